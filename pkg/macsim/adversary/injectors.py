import logging
from typing import List, Optional

from macsim.adversary.leaky_bucket import (
    AdversaryType,
    Injection,
    InjectionTrace,
    SaturatingCounter,
    validate_trace,
)
from macsim.adversary.patterns import DestinationPattern
from macsim.entities.packet import RoundOutcome
from macsim.errors import ConfigError, Inapplicable

logger = logging.getLogger(__name__)


class Injector:
    """Source of per-round injections; adaptive injectors also watch outcomes."""

    name = "none"

    def injections(self, round_index: int) -> List[Injection]:
        return []

    def observe(self, outcome: RoundOutcome):
        pass

    def describe(self) -> dict:
        return {"adversary": self.name}


class SaturatingInjector(Injector):
    """Injects the greedy maximum admissible number of packets every round."""

    name = "saturating"

    def __init__(self, adversary: AdversaryType, pattern: DestinationPattern):
        self.adversary = adversary
        self.pattern = pattern
        self._counter = SaturatingCounter(adversary)
        self._serial = 0

    def injections(self, round_index: int) -> List[Injection]:
        batch = []
        for _ in range(self._counter.next_count()):
            batch.append(self.pattern(self._serial, round_index))
            self._serial += 1
        return batch

    def describe(self) -> dict:
        return {"adversary": self.name, "pattern": self.pattern.name}


class ScriptedInjector(Injector):
    """Replays a fixed trace, refusing inadmissible ones."""

    name = "scripted"

    def __init__(self, trace: InjectionTrace, adversary: Optional[AdversaryType] = None, n: Optional[int] = None):
        if adversary is not None:
            result = validate_trace(trace, adversary)
            if not result:
                raise ConfigError(f"scripted trace is not admissible: {result.describe()}")
        if n is not None:
            for round_index, station, destination in trace.rows():
                if not (0 <= station < n and 0 <= destination < n):
                    raise ConfigError(f"round {round_index}: injection {station}->{destination} outside 0..{n - 1}")
        self.trace = trace

    def injections(self, round_index: int) -> List[Injection]:
        return self.trace.at(round_index)

    def describe(self) -> dict:
        return {"adversary": self.name, "injections": self.trace.total}


class AdaptiveCap2Adversary(Injector):
    """Online adversary against algorithms that switch on at most two stations.

    One packet per round goes into station 0 (s1). While the tracked station
    s is off, destinations alternate between s and station 1 (s2), s first.
    A packet for s can then only leave s1 in a round where s is on, and a
    packet for s2 only in a round where s1 and s2 are both on. When s
    switches on the iteration is committed and a fresh tracked station is
    picked among 2..n-1; with n=3 station 2 is tracked again.

    The adversary sees on/off sets only and commits at the wakeup itself,
    so the labelling of packets already injected is never revised.
    """

    name = "adaptive-cap2"

    def __init__(self, n: int, energy_cap: int):
        if energy_cap >= 3:
            raise Inapplicable(f"the cap-2 adversary needs energy cap 2, got {energy_cap}")
        if n < 3:
            raise Inapplicable(f"the cap-2 adversary needs at least 3 stations, got {n}")
        self.n = n
        self.source = 0
        self.partner = 1
        self.tracked = 2
        self.iterations = 0
        self._serial = 0

    def injections(self, round_index: int) -> List[Injection]:
        destination = self.tracked if self._serial % 2 == 0 else self.partner
        self._serial += 1
        return [(self.source, destination)]

    def observe(self, outcome: RoundOutcome):
        if len(outcome.on_stations) >= 3:
            raise Inapplicable(
                f"round {outcome.round}: {len(outcome.on_stations)} stations on, the cap-2 adversary does not apply"
            )
        if self.tracked in outcome.on_stations:
            self.iterations += 1
            self.tracked = self._next_tracked()
            logger.debug("round %d: iteration %d committed, tracking %d", outcome.round, self.iterations, self.tracked)

    def _next_tracked(self) -> int:
        candidates = list(range(2, self.n))
        position = candidates.index(self.tracked)
        return candidates[(position + 1) % len(candidates)]

    def describe(self) -> dict:
        return {"adversary": self.name, "iterations": self.iterations, "tracked": self.tracked}
