from typing import Callable, FrozenSet

import numpy as np

from macsim.algorithms.base import RoutingAlgorithm
from macsim.errors import ConfigError


class ObliviousSchedule:
    """Station-by-round on/off matrix fixed before any injection."""

    def __init__(self, n: int, cap: int, on_set: Callable[[int], FrozenSet[int]]):
        self.n = n
        self.cap = cap
        self._on_set = on_set

    def is_on(self, station: int, round_index: int) -> bool:
        return station in self._on_set(round_index)

    def on_set(self, round_index: int) -> FrozenSet[int]:
        return self._on_set(round_index)

    def materialize(self, horizon: int) -> np.ndarray:
        """Boolean matrix with row t-1 holding the on-set of round t."""
        matrix = np.zeros((horizon, self.n), dtype=bool)
        for round_index in range(1, horizon + 1):
            on = self._on_set(round_index)
            if len(on) > self.cap:
                raise ConfigError(f"round {round_index} switches on {len(on)} stations, cap {self.cap}")
            matrix[round_index - 1, list(on)] = True
        return matrix

    def on_counts(self, horizon: int) -> np.ndarray:
        return self.materialize(horizon).sum(axis=0, dtype=np.int64)

    def joint_on_counts(self, horizon: int) -> np.ndarray:
        """n-by-n matrix of rounds in which both stations are on."""
        matrix = self.materialize(horizon).astype(np.int64)
        return matrix.T @ matrix


def extract_oblivious_schedule(algorithm: RoutingAlgorithm) -> ObliviousSchedule:
    if not algorithm.oblivious:
        raise ConfigError(f"{algorithm.name} is not energy-oblivious")
    return ObliviousSchedule(algorithm.n, algorithm.energy_cap, algorithm.on_set)
