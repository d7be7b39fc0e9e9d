# macsim - leaky-bucket adversaries
from macsim.adversary.injectors import AdaptiveCap2Adversary, Injector, SaturatingInjector, ScriptedInjector
from macsim.adversary.leaky_bucket import (
    AdversaryType,
    InjectionTrace,
    ValidationResult,
    read_trace,
    saturating_counts,
    validate_trace,
    write_trace,
)
from macsim.adversary.patterns import build_pattern
from macsim.adversary.witnesses import WitnessResult, oblivious_pair_witness, oblivious_station_witness

__all__ = [
    "AdaptiveCap2Adversary",
    "AdversaryType",
    "InjectionTrace",
    "Injector",
    "SaturatingInjector",
    "ScriptedInjector",
    "ValidationResult",
    "WitnessResult",
    "build_pattern",
    "oblivious_pair_witness",
    "oblivious_station_witness",
    "read_trace",
    "saturating_counts",
    "validate_trace",
    "write_trace",
]
