from fractions import Fraction
from pathlib import Path
from typing import Iterable, Tuple

import pytest

import macsim
from macsim.adversary.leaky_bucket import InjectionTrace
from macsim.config import EngineConfig

DATA_DIR = Path(macsim.__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def make_config():
    """Factory for engine configs with small defaults."""

    def factory(**overrides) -> EngineConfig:
        values = dict(
            n=4,
            energy_cap=2,
            horizon=100,
            algorithm="count-hop",
            adversary="none",
            rho=Fraction(1, 2),
            beta=Fraction(1),
        )
        values.update(overrides)
        return EngineConfig(**values)

    return factory


@pytest.fixture
def make_trace():
    """Build an injection trace from (round, station, destination) rows."""

    def factory(rows: Iterable[Tuple[int, int, int]], horizon: int = 0) -> InjectionTrace:
        trace = InjectionTrace(horizon=horizon)
        for round_index, station, destination in rows:
            trace.add(round_index, station, destination)
        return trace

    return factory
