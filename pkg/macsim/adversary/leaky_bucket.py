"""Leaky-bucket adversary types, injection traces and their validation."""

import csv
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import DefaultDict, Iterator, List, Optional, Sequence, Tuple, Union

from macsim.errors import ConfigError

Injection = Tuple[int, int]

TRACE_HEADER = ("round", "station", "destination")


@dataclass(frozen=True)
class AdversaryType:
    """At most rho * t + beta injections in any t consecutive rounds."""

    rho: Fraction
    beta: Fraction

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ConfigError(f"rho must lie in (0, 1], got {self.rho}")
        if self.beta < 1:
            raise ConfigError(f"beta must be at least 1, got {self.beta}")

    @property
    def burstiness(self) -> int:
        return math.floor(self.beta + self.rho)

    def allowance(self, length: int) -> Fraction:
        return self.rho * length + self.beta


@dataclass
class InjectionTrace:
    """Injections per round over rounds 1..horizon."""

    horizon: int
    per_round: DefaultDict[int, List[Injection]] = field(default_factory=lambda: defaultdict(list))

    def add(self, round_index: int, station: int, destination: int):
        if round_index < 1:
            raise ConfigError(f"injection rounds start at 1, got {round_index}")
        self.per_round[round_index].append((station, destination))
        self.horizon = max(self.horizon, round_index)

    def at(self, round_index: int) -> List[Injection]:
        return list(self.per_round.get(round_index, ()))

    def counts(self) -> List[int]:
        """Injection count of each round 1..horizon."""
        return [len(self.per_round.get(r, ())) for r in range(1, self.horizon + 1)]

    @property
    def total(self) -> int:
        return sum(len(batch) for batch in self.per_round.values())

    def rows(self) -> Iterator[Tuple[int, int, int]]:
        for round_index in sorted(self.per_round):
            for station, destination in self.per_round[round_index]:
                yield round_index, station, destination

    @classmethod
    def from_counts(cls, counts: Sequence[int], pattern) -> "InjectionTrace":
        """Trace with counts[t-1] injections in round t, placed by a destination pattern."""
        trace = cls(horizon=len(counts))
        serial = 0
        for round_index, count in enumerate(counts, start=1):
            for _ in range(count):
                station, destination = pattern(serial, round_index)
                trace.add(round_index, station, destination)
                serial += 1
        return trace


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    interval: Optional[Tuple[int, int]] = None
    count: int = 0
    allowance: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "trace is admissible"
        start, end = self.interval
        return f"interval [{start}, {end}] holds {self.count} injections, allowance {self.allowance}"


def validate_trace(trace: InjectionTrace, adversary: AdversaryType) -> ValidationResult:
    """Check every interval in one pass.

    The interval (c, b] holds P(b) - P(c) injections, so it violates the bound
    iff (P(b) - rho*b) - (P(c) - rho*c) > beta. For each b it is enough to
    compare against the minimum of P(c) - rho*c over c < b.
    """
    rho, beta = adversary.rho, adversary.beta
    prefix = 0
    best = Fraction(0)
    best_at = 0
    for b, count in enumerate(trace.counts(), start=1):
        prefix += count
        excess = prefix - rho * b - best
        if excess > beta:
            start = best_at + 1
            length = b - best_at
            injected = int(prefix - (best + rho * best_at))
            return ValidationResult(False, (start, b), injected, adversary.allowance(length))
        value = prefix - rho * b
        if value < best:
            best, best_at = value, b
    return ValidationResult(True)


def saturating_counts(adversary: AdversaryType, horizon: int) -> List[int]:
    """Greedy maximal admissible injection counts for rounds 1..horizon."""
    return list(itertools.islice(_saturating_stream(adversary), horizon))


def _saturating_stream(adversary: AdversaryType) -> Iterator[int]:
    rho, beta = adversary.rho, adversary.beta
    prefix = 0
    lowest = Fraction(0)
    round_index = 0
    while True:
        round_index += 1
        count = math.floor(lowest + rho * round_index + beta) - prefix
        prefix += count
        lowest = min(lowest, prefix - rho * round_index)
        yield count


class SaturatingCounter:
    """Online form of saturating_counts, one round at a time."""

    def __init__(self, adversary: AdversaryType):
        self._stream = _saturating_stream(adversary)

    def next_count(self) -> int:
        return next(self._stream)


def write_trace(trace: InjectionTrace, path: Union[str, Path]):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in trace.rows():
            writer.writerow(row)


def read_trace(path: Union[str, Path], horizon: int = 0) -> InjectionTrace:
    """Load a round,station,destination CSV trace."""
    trace = InjectionTrace(horizon=horizon)
    try:
        with open(path, "r", newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(column.strip() for column in header) != TRACE_HEADER:
                raise ConfigError(f"trace {path} must start with the header {','.join(TRACE_HEADER)}")
            for line_number, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    round_index, station, destination = (int(value) for value in row)
                except ValueError:
                    raise ConfigError(f"trace {path}, line {line_number}: expected three integers, got {row}")
                trace.add(round_index, station, destination)
    except FileNotFoundError:
        raise ConfigError(f"trace file not found: {path}")
    return trace
