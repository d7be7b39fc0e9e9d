"""Plain-packet universal routing with doubling windows.

Every window of L rounds has three stages. In Gossip, each large station
(queue at least 4n*lg(L) at the window start) tells every other station its
queue size, the number of its packets addressed to that station and the
number addressed to smaller names, one bit per round by transmitting or
staying silent. In Main the large stations empty their queues along a
schedule every station can derive from what it heard. The Auxiliary stage
gives every ordered pair of stations its own rounds for whatever is left.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from macsim.algorithms.base import RoutingAlgorithm
from macsim.entities.bits import decode_uints, encode_uints, lg
from macsim.entities.packet import Message, Packet, RoundOutcome, StationAction
from macsim.errors import AlgorithmError, QueueUnderflow, StageOverflow

logger = logging.getLogger(__name__)


def initial_window(n: int) -> int:
    """Smallest L with L - 9n^3 lg(L) >= L/2."""
    factor = 18 * n ** 3
    bits = 1
    while True:
        candidate = max(1 << (bits - 1), factor * bits)
        if candidate < 1 << bits:
            return candidate
        bits += 1


@dataclass(frozen=True)
class WindowShape:
    start: int
    length: int
    lg: int
    gossip_phase: int
    gossip: int
    main: int
    auxiliary: int

    @classmethod
    def build(cls, n: int, start: int, length: int) -> "WindowShape":
        bits = lg(length)
        gossip_phase = 2 + 3 * bits
        gossip = n * n * gossip_phase
        auxiliary = 8 * n ** 3 * bits
        main = length - gossip - auxiliary
        if main <= 0:
            raise StageOverflow(start, f"window of {length} rounds leaves no room for the Main stage")
        return cls(start, length, bits, gossip_phase, gossip, main, auxiliary)

    @property
    def end(self) -> int:
        """First round of the next window."""
        return self.start + self.length


@dataclass(frozen=True)
class GossipRecord:
    """What a listener learned about one station during Gossip."""

    large: bool
    exceeds: bool = False
    capped_size: int = 0
    to_listener: int = 0
    below_listener: int = 0


def coded_transfer(bits: str) -> List[bool]:
    """Rounds in which the sender transmits: one per bit, on for a 1."""
    return [bit == "1" for bit in bits]


def decode_transfer(heard: Sequence[bool]) -> str:
    return "".join("1" if flag else "0" for flag in heard)


def main_listen_intervals(
    records: Mapping[int, GossipRecord], listener: int, main_length: int
) -> List[Tuple[int, int]]:
    """Main-stage offsets [start, end) in which the listener receives.

    Large sources take turns in name order, each sending its packets sorted
    by destination, so the listener's packets from source i start at
    offset(i) + below_listener(i).
    """
    intervals = []
    offset = 0
    for source in sorted(records):
        record = records[source]
        if not record.large:
            continue
        if source != listener and record.to_listener:
            start = offset + record.below_listener
            end = min(start + record.to_listener, main_length)
            if start < end:
                intervals.append((start, end))
        offset += record.capped_size
    return intervals


@dataclass
class _MainPlan:
    dedicated: Optional[int]
    listen: List[Tuple[int, int]]
    send_offset: Optional[int]
    doubling: bool


class _WindowView:
    """One station's knowledge of the current window."""

    def __init__(self, shape: WindowShape):
        self.shape = shape
        self.size = 0
        self.large = False
        self.exceeds = False
        self.to: List[int] = []
        self.below: List[int] = []
        self.gossip_rounds: Dict[int, List[bool]] = {}
        self.records: Dict[int, GossipRecord] = {}
        self.flag_phase = -1
        self.flags: List[bool] = []
        self.plan: Optional[_MainPlan] = None


class AdjustWindow(RoutingAlgorithm):
    name = "adjust-window"
    plain_packet = True
    direct_routing = False

    def __init__(self, n: int, energy_cap: int, initial: Optional[int] = None):
        super().__init__(n, energy_cap)
        self.initial_length = initial if initial is not None else initial_window(n)
        # Validate the stage split up front
        WindowShape.build(n, 1, self.initial_length)
        self.views: List[_WindowView] = []
        self.windows: List[Tuple[int, int]] = []

    def bind(self, stations):
        super().bind(stations)
        shape = WindowShape.build(self.n, 1, self.initial_length)
        self.views = [_WindowView(shape) for _ in range(self.n)]

    def first_wake(self, name: int) -> Optional[int]:
        return 1

    def large_threshold(self, shape: WindowShape) -> int:
        return 4 * self.n * shape.lg

    # -- window bookkeeping -------------------------------------------------

    def begin_round(self, round_index: int):
        view = self.views[0]
        if round_index == view.shape.start and not self.windows:
            self._open_windows(round_index, self.initial_length)
        elif round_index == view.shape.end:
            decisions = {v.plan.doubling if v.plan else None for v in self.views}
            if len(decisions) != 1 or None in decisions:
                raise AlgorithmError(round_index, f"stations disagree on doubling the window: {decisions}")
            length = view.shape.length * (2 if decisions.pop() else 1)
            if length != view.shape.length:
                logger.info("round %d: window doubles to %d rounds", round_index, length)
            self._open_windows(round_index, length)
        elif round_index == view.shape.start + view.shape.gossip:
            for name in range(self.n):
                self._ensure_plan(name)

    def _open_windows(self, round_index: int, length: int):
        self.windows.append((round_index, length))
        for name in range(self.n):
            shape = WindowShape.build(self.n, round_index, length)
            view = _WindowView(shape)
            queue = self.queue(name)
            view.size = len(queue)
            view.large = view.size >= self.large_threshold(shape)
            view.exceeds = view.size > length
            view.to = [0] * self.n
            for packet in queue:
                view.to[packet.destination] += 1
            running = 0
            for destination in range(self.n):
                view.below.append(running)
                running += view.to[destination]
            if view.large:
                for listener in range(self.n):
                    if listener != name:
                        fields = [min(view.size, length), min(view.to[listener], length), min(view.below[listener], length)]
                        view.gossip_rounds[listener] = coded_transfer(encode_uints(fields, shape.lg))
            view.records[name] = GossipRecord(view.large, view.exceeds, min(view.size, length), 0, 0)
            self.views[name] = view

    def _ensure_plan(self, name: int) -> _MainPlan:
        view = self.views[name]
        if view.plan is not None:
            return view.plan
        records = {source: view.records.get(source, GossipRecord(False)) for source in range(self.n)}
        exceeding = [source for source in range(self.n) if records[source].large and records[source].exceeds]
        total = sum(record.capped_size for record in records.values() if record.large)
        dedicated = exceeding[0] if exceeding else None
        send_offset = None
        listen: List[Tuple[int, int]] = []
        if dedicated is None:
            listen = main_listen_intervals(records, name, view.shape.main)
            if view.large:
                send_offset = sum(records[source].capped_size for source in range(name) if records[source].large)
        view.plan = _MainPlan(dedicated, listen, send_offset, bool(exceeding) or total > view.shape.main)
        return view.plan

    # -- per-round decisions ------------------------------------------------

    def _decide(self, name: int, round_index: int) -> Optional[Tuple[str, Optional[int]]]:
        """('listen', None), ('gossip', j) or ('to', d) for the round, None when off."""
        view = self.views[name]
        shape = view.shape
        offset = round_index - shape.start
        if offset < 0 or offset >= shape.length:
            return None

        if offset < shape.gossip:
            phase, step = divmod(offset, shape.gossip_phase)
            source, listener = divmod(phase, self.n)
            if source == listener:
                return None
            if name == listener:
                if step == 0 or (view.flag_phase == phase and view.flags and view.flags[0]):
                    return ("listen", None)
                return None
            if name == source and view.large:
                if step == 0 or (step == 1 and view.exceeds):
                    return ("gossip", listener)
                if step >= 2 and view.gossip_rounds[listener][step - 2]:
                    return ("gossip", listener)
            return None

        offset -= shape.gossip
        if offset < shape.main:
            plan = self._ensure_plan(name)
            if plan.dedicated is not None:
                others = [station for station in range(self.n) if station != plan.dedicated]
                listener = others[offset % len(others)]
                if name == listener:
                    return ("listen", None)
                return ("to", listener) if name == plan.dedicated else None
            for start, end in plan.listen:
                if start <= offset < end:
                    return ("listen", None)
            if plan.send_offset is not None and plan.send_offset <= offset < plan.send_offset + min(view.size, shape.length):
                slot = offset - plan.send_offset
                for destination in range(self.n):
                    if view.below[destination] <= slot < view.below[destination] + view.to[destination]:
                        return ("to", destination)
            return None

        offset -= shape.main
        source, listener = divmod(offset % (self.n * self.n), self.n)
        if source == listener:
            return None
        if name == listener:
            return ("listen", None)
        return ("to", listener) if name == source else None

    def _packet_to(self, name: int, destination: int) -> Optional[Packet]:
        return self.queue(name).first(lambda p: p.destination == destination)

    def _is_on(self, name: int, round_index: int) -> bool:
        decision = self._decide(name, round_index)
        if decision is None:
            return False
        kind, destination = decision
        return kind != "to" or self._packet_to(name, destination) is not None

    def act(self, name: int, round_index: int) -> StationAction:
        decision = self._decide(name, round_index)
        if decision is None:
            return StationAction.off()
        kind, destination = decision
        if kind == "listen":
            return StationAction.listen()
        if kind == "gossip":
            queue = self.queue(name)
            packet = self._packet_to(name, destination) or (queue.queue[0] if len(queue) else None)
            if packet is None:
                raise QueueUnderflow(round_index, f"large station {name} ran out of packets while gossiping")
            return StationAction.transmit(Message(name, packet))
        packet = self._packet_to(name, destination)
        if packet is None:
            return StationAction.off()
        return StationAction.transmit(Message(name, packet))

    def adopter(self, round_index, on_stations, sender, packet) -> Optional[int]:
        others = sorted(on_stations - {sender})
        return others[0] if len(others) == 1 else None

    def observe(self, name: int, outcome: RoundOutcome):
        view = self.views[name]
        shape = view.shape
        offset = outcome.round - shape.start
        if offset >= shape.gossip:
            return
        phase, step = divmod(offset, shape.gossip_phase)
        source, listener = divmod(phase, self.n)
        if name != listener:
            return
        if step == 0:
            view.flag_phase = phase
            view.flags = [outcome.heard]
            if not outcome.heard:
                view.records[source] = GossipRecord(False)
            return
        view.flags.append(outcome.heard)
        if step == shape.gossip_phase - 1:
            size, to_listener, below_listener = decode_uints(decode_transfer(view.flags[2:]), shape.lg)
            view.records[source] = GossipRecord(True, view.flags[1], size, to_listener, below_listener)

    def next_wake(self, name: int, round_index: int) -> Optional[int]:
        end = self.views[name].shape.end
        return self._scan(round_index, lambda t: self._is_on(name, t), end - round_index - 1, end)

    def describe(self):
        doublings = [start for (start, length), (_, previous) in zip(self.windows[1:], self.windows) if length > previous]
        return {
            "initial_window": self.initial_length,
            "final_window": self.windows[-1][1] if self.windows else self.initial_length,
            "windows": len(self.windows),
            "doublings": doublings,
        }
