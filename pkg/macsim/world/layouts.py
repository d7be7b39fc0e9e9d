"""Combinatorial layouts behind the energy-oblivious algorithms."""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from macsim.errors import ConfigError, Degenerate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupLayout:
    """Overlapping station groups arranged in a cycle (k-Cycle).

    Consecutive groups share exactly one station, their connector. The last
    group ends with station 0, which connects it back to the first group,
    and is padded with dummies (None) up to k entries.
    """

    n: int
    k: int
    effective_k: int
    groups: Tuple[Tuple[Optional[int], ...], ...]
    delta: int

    @property
    def length(self) -> int:
        return len(self.groups)

    @property
    def period(self) -> int:
        return self.length * self.delta

    def members(self, group: int) -> Tuple[int, ...]:
        """Real stations of a group in name order."""
        return tuple(sorted(s for s in self.groups[group] if s is not None))

    def connector(self, group: int) -> int:
        """Station shared by the group and its successor in the cycle."""
        return [s for s in self.groups[group] if s is not None][-1]

    def groups_of(self, station: int) -> List[int]:
        return [index for index, group in enumerate(self.groups) if station in group]

    def forward_group(self, station: int) -> int:
        """The group in which the station is not the outgoing connector."""
        for index in self.groups_of(station):
            if self.connector(index) != station:
                return index
        raise Degenerate(f"station {station} has no forwarding group")

    def route_group(self, station: int, destination: int) -> int:
        """Group in which a packet at the station is transmitted next."""
        for index in self.groups_of(station):
            if destination in self.groups[index]:
                return index
        return self.forward_group(station)

    def active_group(self, round_index: int) -> int:
        return ((round_index - 1) // self.delta) % self.length

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": "k-cycle",
            "n": self.n,
            "k": self.k,
            "effective_k": self.effective_k,
            "delta": self.delta,
            "groups": [list(group) for group in self.groups],
            "connectors": [self.connector(index) for index in range(self.length)],
        }


def build_group_layout(n: int, k: int) -> GroupLayout:
    """Cut the cyclic station sequence 0..n-1,0 into groups overlapping by one."""
    if n < 3:
        raise Degenerate(f"k-Cycle needs at least 3 stations, got {n}")
    if not 2 <= k < n:
        raise Degenerate(f"k-Cycle needs 2 <= k < n, got k={k}, n={n}")

    effective_k = k
    if 2 * k > n + 1:
        effective_k = (n + 1) // 2
        logger.info("k-Cycle: k reduced from %d to %d for n=%d", k, effective_k, n)

    sequence = list(range(n)) + [0]
    groups = []
    start = 0
    while True:
        chunk: List[Optional[int]] = list(sequence[start:start + effective_k])
        chunk += [None] * (effective_k - len(chunk))
        groups.append(tuple(chunk))
        if start + effective_k >= len(sequence):
            break
        start += effective_k - 1

    delta = -(-4 * (n - 1) * effective_k // (n - effective_k))
    return GroupLayout(n=n, k=k, effective_k=effective_k, groups=tuple(groups), delta=delta)


@dataclass(frozen=True)
class PairLayout:
    """Disjoint station sets of size k/2 and all unordered pairs of sets (k-Clique)."""

    n: int
    k: int
    effective_k: int
    sets: Tuple[Tuple[int, ...], ...]
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def set_size(self) -> int:
        return self.effective_k // 2

    def set_of(self, station: int) -> int:
        return station // self.set_size

    def members(self, pair: int) -> Tuple[int, ...]:
        first, second = self.pairs[pair]
        return tuple(sorted(self.sets[first] + self.sets[second]))

    def pairs_for(self, station: int, destination: int) -> List[int]:
        """Pairs whose rounds may carry a packet from station to destination."""
        wanted = {self.set_of(station), self.set_of(destination)}
        return [index for index, pair in enumerate(self.pairs) if wanted <= set(pair)]

    def active_pair(self, round_index: int) -> int:
        return (round_index - 1) % len(self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": "k-clique",
            "n": self.n,
            "k": self.k,
            "effective_k": self.effective_k,
            "sets": [list(members) for members in self.sets],
            "pairs": [list(pair) for pair in self.pairs],
        }


def build_pair_layout(n: int, k: int) -> PairLayout:
    """Largest even k' <= min(k, 2n/3) dividing 2n; 2n/k' sets of size k'/2."""
    if n < 3:
        raise Degenerate(f"k-Clique needs at least 3 stations, got {n}")
    if not 2 <= k < n:
        raise Degenerate(f"k-Clique needs 2 <= k < n, got k={k}, n={n}")

    effective_k = 0
    for candidate in range(min(k, (2 * n) // 3), 1, -1):
        if candidate % 2 == 0 and (2 * n) % candidate == 0:
            effective_k = candidate
            break
    if effective_k == 0:
        raise Degenerate(f"no even divisor of {2 * n} fits k={k}, n={n}")
    if effective_k != k:
        logger.info("k-Clique: k repaired from %d to %d for n=%d", k, effective_k, n)

    size = effective_k // 2
    sets = tuple(tuple(range(start, start + size)) for start in range(0, n, size))
    pairs = tuple(itertools.combinations(range(len(sets)), 2))
    return PairLayout(n=n, k=k, effective_k=effective_k, sets=sets, pairs=pairs)


@dataclass(frozen=True)
class ThreadLayout:
    """All k-subsets of the stations in lexicographic order, one thread each."""

    n: int
    k: int
    subsets: Tuple[Tuple[int, ...], ...]

    @property
    def gamma(self) -> int:
        return len(self.subsets)

    def thread_of(self, round_index: int) -> int:
        return (round_index - 1) % self.gamma

    def threads_of(self, station: int) -> List[int]:
        return [index for index, subset in enumerate(self.subsets) if station in subset]

    def eligible(self, station: int, destination: int) -> List[int]:
        """Threads whose subset holds both endpoints."""
        return [
            index for index, subset in enumerate(self.subsets)
            if station in subset and destination in subset
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": "k-subsets",
            "n": self.n,
            "k": self.k,
            "gamma": self.gamma,
            "subsets": [list(subset) for subset in self.subsets],
        }


def build_thread_layout(n: int, k: int, max_gamma: int) -> ThreadLayout:
    if n < 3:
        raise Degenerate(f"k-Subsets needs at least 3 stations, got {n}")
    if not 2 <= k < n:
        raise Degenerate(f"k-Subsets needs 2 <= k < n, got k={k}, n={n}")
    gamma = math.comb(n, k)
    if gamma > max_gamma:
        raise ConfigError(f"C({n},{k}) = {gamma} threads exceeds the limit {max_gamma}")
    subsets = tuple(itertools.combinations(range(n), k))
    return ThreadLayout(n=n, k=k, subsets=subsets)
