import bisect
import logging
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence

from macsim.entities.packet import Packet, RoundOutcome, StationAction
from macsim.entities.station import Station
from macsim.errors import EnergyCapViolation

logger = logging.getLogger(__name__)


class RoutingAlgorithm:
    """Base class for routing algorithms driven round by round by the channel.

    The channel consults only stations whose timer has expired. Subclasses
    override the hooks they need; every hook receives a station name and
    must base its answer on that station's own queue and on what that
    station heard.
    """

    name = "base"
    # Messages carry a packet and nothing else
    plain_packet = False
    # Packets go straight from injection station to destination
    direct_routing = True
    oblivious = False
    min_energy_cap = 2

    def __init__(self, n: int, energy_cap: int):
        self.n = n
        self.energy_cap = energy_cap
        self.stations: List[Station] = []
        self.notes: Dict[str, Any] = {}

    def bind(self, stations: Sequence[Station]):
        """Attach the stations the channel created for this run."""
        if len(stations) != self.n:
            raise ValueError(f"{self.name} built for {self.n} stations, got {len(stations)}")
        if self.energy_cap < self.min_energy_cap:
            raise EnergyCapViolation(
                0, f"{self.name} needs an energy cap of at least {self.min_energy_cap}, got {self.energy_cap}"
            )
        self.stations = list(stations)

    def queue(self, name: int) -> Station:
        return self.stations[name]

    def first_wake(self, name: int) -> Optional[int]:
        """First round in which the station is switched on, None for never."""
        return None

    def begin_round(self, round_index: int):
        """Clock tick before the round's actions; local bookkeeping only."""

    def on_arrival(self, name: int, packet: Packet, round_index: int):
        """A packet was injected into the station's queue."""

    def act(self, name: int, round_index: int) -> StationAction:
        return StationAction.off()

    def actions(self, round_index: int, awake: FrozenSet[int]) -> Dict[int, StationAction]:
        return {name: self.act(name, round_index) for name in sorted(awake)}

    def adopter(
        self, round_index: int, on_stations: FrozenSet[int], sender: int, packet: Packet
    ) -> Optional[int]:
        """Station that adopts a heard packet whose destination is off."""
        return None

    def observe(self, name: int, outcome: RoundOutcome):
        """Feedback of a round in which the station was switched on."""

    def next_wake(self, name: int, round_index: int) -> Optional[int]:
        """Round after round_index at which the station switches on again."""
        return None

    def end_round(self, outcome: RoundOutcome):
        """Called once per round after every station observed the outcome."""

    def on_set(self, round_index: int) -> FrozenSet[int]:
        raise NotImplementedError(f"{self.name} has no precomputed on/off schedule")

    def describe(self) -> Dict[str, Any]:
        """Algorithm-specific notes copied into the experiment report."""
        return dict(self.notes)

    def _scan(
        self,
        round_index: int,
        is_on: Callable[[int], bool],
        limit: int,
        fallback: Optional[int] = None,
    ) -> Optional[int]:
        """First round in (round_index, round_index + limit] accepted by is_on."""
        for candidate in range(round_index + 1, round_index + limit + 1):
            if is_on(candidate):
                return candidate
        return fallback


class NullAlgorithm(RoutingAlgorithm):
    """Every station stays off for the whole run."""

    name = "null"
    plain_packet = True


class PeriodicSchedule(RoutingAlgorithm):
    """Energy-oblivious algorithm whose on-sets repeat with a fixed period."""

    oblivious = True

    def __init__(self, n: int, energy_cap: int):
        super().__init__(n, energy_cap)
        self._period_sets: List[FrozenSet[int]] = []
        self._wake_offsets: List[List[int]] = []

    def _install_period(self, on_sets: Iterable[FrozenSet[int]]):
        """Precompute per-station wake offsets for one period of on-sets."""
        self._period_sets = [frozenset(on) for on in on_sets]
        self._wake_offsets = [[] for _ in range(self.n)]
        for offset, on in enumerate(self._period_sets):
            for name in on:
                self._wake_offsets[name].append(offset)

    @property
    def period(self) -> int:
        return len(self._period_sets)

    def on_set(self, round_index: int) -> FrozenSet[int]:
        return self._period_sets[(round_index - 1) % self.period]

    def is_on(self, name: int, round_index: int) -> bool:
        return name in self.on_set(round_index)

    def first_wake(self, name: int) -> Optional[int]:
        return self.next_wake(name, 0)

    def next_wake(self, name: int, round_index: int) -> Optional[int]:
        offsets = self._wake_offsets[name]
        if not offsets:
            return None
        # Rounds are 1-based, offsets 0-based: round r sits at offset (r - 1) % period
        base, position = divmod(round_index, self.period)
        index = bisect.bisect_left(offsets, position)
        if index < len(offsets):
            return base * self.period + offsets[index] + 1
        return (base + 1) * self.period + offsets[0] + 1
