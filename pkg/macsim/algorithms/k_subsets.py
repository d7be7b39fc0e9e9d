import logging
from typing import Dict, List, Optional, Tuple

from macsim.algorithms.base import PeriodicSchedule
from macsim.algorithms.tokens import MoveBigToFront, TokenRing, check_lists_agree
from macsim.entities.packet import Feedback, Message, Packet, RoundOutcome, StationAction
from macsim.errors import ConfigError, NoEligibleThread
from macsim.world.layouts import build_thread_layout

logger = logging.getLogger(__name__)

WITHHOLDING_MODES = ("mbtf", "rrw")


class KSubsets(PeriodicSchedule):
    """One thread per k-subset of stations; round t belongs to thread (t-1) mod gamma.

    At every phase start (each gamma rounds) a station spreads the packets it
    received in the previous phase over the threads that contain both the
    station and the destination, keeping per-destination thread loads
    balanced. Each thread then runs move-big-to-front over its own queues,
    or plain round-robin withholding in "rrw" mode.
    """

    name = "k-subsets"

    def __init__(
        self,
        n: int,
        energy_cap: int,
        max_gamma: int,
        withholding: str = "mbtf",
        mbtf_threshold: Optional[int] = None,
    ):
        super().__init__(n, energy_cap)
        if withholding not in WITHHOLDING_MODES:
            raise ConfigError(f"unknown withholding mode {withholding!r}; choose from {', '.join(WITHHOLDING_MODES)}")
        self.layout = build_thread_layout(n, energy_cap, max_gamma)
        self.withholding = withholding
        self.plain_packet = withholding == "rrw"
        self.threshold = mbtf_threshold if mbtf_threshold is not None else energy_cap
        if self.threshold < 1:
            raise ConfigError(f"mbtf_threshold must be positive, got {self.threshold}")
        self._install_period(frozenset(subset) for subset in self.layout.subsets)

        # allocation[v][packet id] -> thread for packets still queued at v; loads[v][w][thread] -> packets ever allocated
        self.allocation: List[Dict[int, int]] = [{} for _ in range(n)]
        self.loads: List[List[Dict[int, int]]] = [
            [{thread: 0 for thread in self.layout.eligible(v, w)} if v != w else {} for w in range(n)]
            for v in range(n)
        ]
        self.lists: Dict[Tuple[int, int], MoveBigToFront] = {}
        self.rings: Dict[Tuple[int, int], TokenRing] = {}
        for thread, subset in enumerate(self.layout.subsets):
            for station in subset:
                self.lists[(thread, station)] = MoveBigToFront(subset)
                self.rings[(thread, station)] = TokenRing(subset)
        self.max_spread = 0
        self.notes.update({"gamma": self.layout.gamma, "withholding": withholding, "mbtf_threshold": self.threshold})

    def begin_round(self, round_index: int):
        if (round_index - 1) % self.layout.gamma == 0:
            for station in range(self.n):
                self.allocate(station, round_index)

    def allocate(self, station: int, phase_start: int) -> List[Tuple[int, int]]:
        """Assign the station's unallocated packets that arrived before phase_start."""
        assigned = []
        allocation = self.allocation[station]
        for packet in self.queue(station):
            if packet.arrival_round >= phase_start or packet.id in allocation:
                continue
            loads = self.loads[station][packet.destination]
            if not loads:
                raise NoEligibleThread(phase_start, f"no thread holds both {station} and {packet.destination}")
            thread = min(loads, key=lambda index: (loads[index], index))
            loads[thread] += 1
            allocation[packet.id] = thread
            assigned.append((packet.id, thread))
        self.max_spread = max(self.max_spread, self.allocation_spread(station))
        return assigned

    def allocation_spread(self, station: int) -> int:
        """Largest max-min gap of thread loads over the station's destinations."""
        spread = 0
        for loads in self.loads[station]:
            if loads:
                spread = max(spread, max(loads.values()) - min(loads.values()))
        return spread

    def thread_queue(self, station: int, thread: int) -> List[Packet]:
        allocation = self.allocation[station]
        return [packet for packet in self.queue(station) if allocation.get(packet.id) == thread]

    def act(self, name: int, round_index: int) -> StationAction:
        thread = self.layout.thread_of(round_index)
        if self.withholding == "mbtf":
            if self.lists[(thread, name)].holder != name:
                return StationAction.listen()
            queue = self.thread_queue(name, thread)
            if not queue:
                return StationAction.listen()
            big = "1" if len(queue) >= self.threshold else "0"
            return StationAction.transmit(Message(name, queue[0], big))

        ring = self.rings[(thread, name)]
        if ring.holder != name:
            return StationAction.listen()
        for packet in self.thread_queue(name, thread):
            if packet.arrival_round < ring.phase_start:
                return StationAction.transmit(Message(name, packet))
        return StationAction.listen()

    def observe(self, name: int, outcome: RoundOutcome):
        thread = self.layout.thread_of(outcome.round)
        if self.withholding == "mbtf":
            copy = self.lists[(thread, name)]
            if outcome.feedback is Feedback.SILENT:
                copy.on_silence()
            elif outcome.heard and outcome.message.control_bits == "1":
                copy.on_big(outcome.sender)
            return
        if outcome.feedback is Feedback.SILENT:
            self.rings[(thread, name)].advance(outcome.round + self.layout.gamma)

    def end_round(self, outcome: RoundOutcome):
        if outcome.delivered is not None:
            self.allocation[outcome.sender].pop(outcome.delivered.id, None)
        if self.withholding == "mbtf":
            thread = self.layout.thread_of(outcome.round)
            copies = [self.lists[(thread, station)] for station in self.layout.subsets[thread]]
            check_lists_agree(copies, outcome.round, thread)

    def describe(self):
        notes = dict(self.notes)
        notes["max_allocation_spread"] = self.max_spread
        return notes
