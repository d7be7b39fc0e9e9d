from typing import Any, Dict, Tuple

from macsim.errors import ConfigError


class DestinationPattern:
    """Places the k-th injected packet: (serial, round) -> (station, destination)."""

    name = "pattern"

    def __init__(self, n: int):
        self.n = n

    def __call__(self, serial: int, round_index: int) -> Tuple[int, int]:
        raise NotImplementedError

    def _check_station(self, station: int, what: str) -> int:
        if not 0 <= station < self.n:
            raise ConfigError(f"{what} {station} is not a station of 0..{self.n - 1}")
        return station


class RoundRobinPattern(DestinationPattern):
    """Sources cycle over all stations; each source cycles its destinations."""

    name = "round-robin"

    def __call__(self, serial: int, round_index: int) -> Tuple[int, int]:
        station = serial % self.n
        lap = serial // self.n
        destination = (station + 1 + lap % (self.n - 1)) % self.n
        return station, destination


class SingleTargetPattern(DestinationPattern):
    """Every packet goes into one station, destinations round-robin over the rest."""

    name = "single-target"

    def __init__(self, n: int, station: int = 0):
        super().__init__(n)
        self.station = self._check_station(station, "target station")

    def __call__(self, serial: int, round_index: int) -> Tuple[int, int]:
        destination = (self.station + 1 + serial % (self.n - 1)) % self.n
        return self.station, destination


class SinglePairPattern(DestinationPattern):
    name = "single-pair"

    def __init__(self, n: int, station: int = 0, destination: int = 1):
        super().__init__(n)
        self.station = self._check_station(station, "source station")
        self.destination = self._check_station(destination, "destination")
        if station == destination:
            raise ConfigError("single-pair pattern needs distinct source and destination")

    def __call__(self, serial: int, round_index: int) -> Tuple[int, int]:
        return self.station, self.destination


class AlternatingPattern(DestinationPattern):
    """The target station changes every `period` rounds, cycling over all stations."""

    name = "alternating"

    def __init__(self, n: int, period: int):
        super().__init__(n)
        if period < 1:
            raise ConfigError(f"alternating period must be positive, got {period}")
        self.period = period

    def __call__(self, serial: int, round_index: int) -> Tuple[int, int]:
        station = ((round_index - 1) // self.period) % self.n
        destination = (station + 1 + serial % (self.n - 1)) % self.n
        return station, destination


PATTERNS = ("round-robin", "single-target", "single-pair", "alternating")


def build_pattern(n: int, params: Dict[str, Any]) -> DestinationPattern:
    name = params.get("pattern", "round-robin")
    if name == "round-robin":
        return RoundRobinPattern(n)
    if name == "single-target":
        return SingleTargetPattern(n, int(params.get("station", 0)))
    if name == "single-pair":
        return SinglePairPattern(n, int(params.get("station", 0)), int(params.get("destination", 1)))
    if name == "alternating":
        return AlternatingPattern(n, int(params.get("period", n ** 3)))
    raise ConfigError(f"unknown destination pattern {name!r}; choose from {', '.join(PATTERNS)}")
