import logging
from dataclasses import asdict, dataclass
from typing import Dict, FrozenSet, List, Optional

from macsim.algorithms.base import RoutingAlgorithm
from macsim.entities.packet import Message, Packet, RoundOutcome, StationAction
from macsim.errors import InconsistentLists

logger = logging.getLogger(__name__)


@dataclass
class SeasonRecord:
    index: int
    start: int
    conductor: int
    big: bool
    scheduled: int
    light_rounds: int = 0


class _StationView:
    """One station's replicated baton list plus what it was taught."""

    def __init__(self, n: int):
        self.baton: List[int] = list(range(n))
        self.position = 0
        self.heard_big: Optional[bool] = None
        # conductor -> slots to listen in during that conductor's next season
        self.taught: Dict[int, FrozenSet[int]] = {}
        self.receiving: FrozenSet[int] = frozenset()
        # Conductor bookkeeping, used while this station holds the baton
        self.current_plan: List[Packet] = []
        self.next_plan: List[Packet] = []
        self.big = False

    @property
    def conductor(self) -> int:
        return self.baton[self.position]

    def hand_over(self, big: bool):
        conductor = self.conductor
        if big:
            self.baton.remove(conductor)
            self.baton.insert(0, conductor)
            self.position = 0
        else:
            self.position = (self.position + 1) % len(self.baton)


class Orchestra(RoutingAlgorithm):
    """Season-based direct routing at injection rate 1 with three stations on.

    A season is n-1 rounds led by the conductor holding the baton. In every
    round the conductor transmits the next packet of its schedule, teaches
    one musician which slots of its next season carry packets for it, and
    repeats its big bit. A big conductor moves to the front of the baton
    list and conducts again.
    """

    name = "orchestra"
    min_energy_cap = 3

    def __init__(self, n: int, energy_cap: int):
        super().__init__(n, energy_cap)
        self.season_length = n - 1
        self.big_threshold = n * n - 1
        self.views: List[_StationView] = []
        self.season_log: List[SeasonRecord] = []

    def bind(self, stations):
        super().bind(stations)
        self.views = [_StationView(self.n) for _ in range(self.n)]

    def first_wake(self, name: int) -> Optional[int]:
        return 1

    def _season_start(self, round_index: int) -> int:
        return round_index - (round_index - 1) % self.season_length

    def _slot(self, round_index: int) -> int:
        """1-based position of the round within its season."""
        return (round_index - 1) % self.season_length + 1

    def musician(self, conductor: int, slot: int) -> int:
        """The slot-th station other than the conductor, in name order."""
        return slot - 1 if slot - 1 < conductor else slot

    def begin_round(self, round_index: int):
        if self._slot(round_index) != 1:
            return
        if round_index > 1:
            self._end_season(round_index)

        conductor = self.views[0].conductor
        for name, view in enumerate(self.views):
            view.heard_big = None
            if name == conductor:
                continue
            view.receiving = view.taught.pop(conductor, frozenset())

        view = self.views[conductor]
        view.current_plan = view.next_plan
        planned = set(id(packet) for packet in view.current_plan)
        old = self.queue(conductor).old_packets(round_index)
        view.next_plan = [packet for packet in old if id(packet) not in planned][: self.season_length]
        view.big = len(old) >= self.big_threshold
        view.heard_big = view.big
        self.season_log.append(
            SeasonRecord(
                index=len(self.season_log),
                start=round_index,
                conductor=conductor,
                big=view.big,
                scheduled=len(view.current_plan),
            )
        )
        if view.big:
            logger.debug("round %d: conductor %d is big with %d old packets", round_index, conductor, len(old))

    def _end_season(self, round_index: int):
        for name, view in enumerate(self.views):
            if view.heard_big is None:
                raise InconsistentLists(round_index, f"station {name} never heard the big bit of conductor {view.conductor}")
            view.hand_over(view.heard_big)
        first = self.views[0]
        for name, view in enumerate(self.views[1:], start=1):
            if view.baton != first.baton or view.position != first.position:
                raise InconsistentLists(
                    round_index, f"station {name} holds {view.baton}@{view.position}, station 0 holds {first.baton}@{first.position}"
                )
        logger.debug("round %d: baton passes to %d", round_index, first.conductor)

    def _teaching_mask(self, view: _StationView, musician: int) -> str:
        slots = ["0"] * self.season_length
        for slot, packet in enumerate(view.next_plan):
            if packet.destination == musician:
                slots[slot] = "1"
        return "".join(slots)

    def _is_on(self, name: int, round_index: int) -> bool:
        view = self.views[name]
        conductor = view.conductor
        slot = self._slot(round_index)
        return name == conductor or self.musician(conductor, slot) == name or slot in view.receiving

    def act(self, name: int, round_index: int) -> StationAction:
        view = self.views[name]
        conductor = view.conductor
        slot = self._slot(round_index)
        if name == conductor:
            packet = view.current_plan[slot - 1] if slot <= len(view.current_plan) else None
            if packet is None:
                self.season_log[-1].light_rounds += 1
            bits = self._teaching_mask(view, self.musician(conductor, slot)) + ("1" if view.big else "0")
            return StationAction.transmit(Message(name, packet, bits))
        if self._is_on(name, round_index):
            return StationAction.listen()
        return StationAction.off()

    def observe(self, name: int, outcome: RoundOutcome):
        view = self.views[name]
        conductor = view.conductor
        if name == conductor or not outcome.heard or outcome.sender != conductor:
            return
        bits = outcome.message.control_bits
        view.heard_big = bits[-1] == "1"
        if self.musician(conductor, self._slot(outcome.round)) == name:
            view.taught[conductor] = frozenset(
                slot for slot, bit in enumerate(bits[:-1], start=1) if bit == "1"
            )

    def next_wake(self, name: int, round_index: int) -> Optional[int]:
        season_end = self._season_start(round_index) + self.season_length - 1
        return self._scan(
            round_index, lambda t: self._is_on(name, t), season_end - round_index, season_end + 1
        )

    def describe(self):
        big_seasons = [record for record in self.season_log if record.big]
        longest = streak = 0
        previous = None
        for record in self.season_log:
            if record.big and previous is not None and previous.big and previous.conductor == record.conductor:
                streak += 1
            else:
                streak = 1 if record.big else 0
            longest = max(longest, streak)
            previous = record
        full = self.season_length
        return {
            "seasons": len(self.season_log),
            "big_seasons": len(big_seasons),
            "longest_big_run": longest,
            "light_rounds": sum(record.light_rounds for record in self.season_log),
            "full_big_seasons_with_light_rounds": sum(
                1 for record in big_seasons if record.scheduled >= full and record.light_rounds
            ),
            "season_log": [asdict(record) for record in self.season_log],
        }
