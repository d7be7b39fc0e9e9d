import json
import logging
import os
import re
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv

from macsim.entities.bits import ceil_log2
from macsim.errors import ConfigError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

ALGORITHMS = (
    "orchestra",
    "count-hop",
    "adjust-window",
    "k-cycle",
    "k-clique",
    "k-subsets",
    "null",
)
ADVERSARIES = (
    "saturating",
    "scripted",
    "station-witness",
    "pair-witness",
    "adaptive-cap2",
    "none",
)

# Keys each adversary strategy reads from its scenario block
ADVERSARY_PARAMS = {
    "saturating": ("pattern", "station", "destination", "period"),
    "scripted": ("trace",),
    "station-witness": ("t",),
    "pair-witness": ("t",),
}

_RATIONAL = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")


def max_gamma() -> int:
    """Largest C(n,k) accepted for k-Subsets (MACSIM_MAX_GAMMA)."""
    raw = os.getenv("MACSIM_MAX_GAMMA", "10000")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"MACSIM_MAX_GAMMA must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"MACSIM_MAX_GAMMA must be positive, got {value}")
    return value


def log_level() -> str:
    return os.getenv("MACSIM_LOG_LEVEL", "WARNING").upper()


def parse_rational(value: Union[str, int, Fraction], what: str = "value") -> Fraction:
    """Parse "p/q" or an integer into an exact fraction; decimals are rejected."""
    if isinstance(value, bool):
        raise ConfigError(f"{what} must be a rational, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ConfigError(f"{what} must be a \"p/q\" string, got {value!r}")
    match = _RATIONAL.match(value)
    if not match:
        raise ConfigError(f"{what} must be written as \"p/q\", got {value!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ConfigError(f"{what} has a zero denominator: {value!r}")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class EngineConfig:
    n: int
    energy_cap: int
    horizon: int
    algorithm: str
    adversary: str
    rho: Fraction
    beta: Fraction
    algorithm_params: Dict[str, Any] = field(default_factory=dict)
    adversary_params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    strict_control_bits: bool = False
    control_bit_factor: int = 4

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"need at least 3 stations, got n={self.n}")
        if not 2 <= self.energy_cap < self.n:
            raise ConfigError(f"energy cap must satisfy 2 <= cap < n, got cap={self.energy_cap}, n={self.n}")
        if self.horizon < 0:
            raise ConfigError(f"horizon must be non-negative, got {self.horizon}")
        if not 0 < self.rho <= 1:
            raise ConfigError(f"rho must lie in (0, 1], got {self.rho}")
        if self.beta < 1:
            raise ConfigError(f"beta must be at least 1, got {self.beta}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.adversary not in ADVERSARIES:
            raise ConfigError(f"unknown adversary {self.adversary!r}; choose from {', '.join(ADVERSARIES)}")
        unknown = sorted(set(self.adversary_params) - set(ADVERSARY_PARAMS.get(self.adversary, ())))
        if unknown:
            raise ConfigError(f"adversary {self.adversary} does not accept parameters: {', '.join(unknown)}")
        if self.control_bit_factor < 1:
            raise ConfigError(f"control_bit_factor must be positive, got {self.control_bit_factor}")

    @property
    def bit_limit(self) -> Optional[int]:
        """Per-message control-bit ceiling in strict mode, None when only audited."""
        if not self.strict_control_bits:
            return None
        return self.control_bit_factor * ceil_log2(self.n)

    def with_rho(self, rho: Fraction) -> "EngineConfig":
        return _replace(self, rho=rho)

    def with_horizon(self, horizon: int) -> "EngineConfig":
        return _replace(self, horizon=horizon)


def _replace(config: EngineConfig, **changes) -> EngineConfig:
    values = {f.name: getattr(config, f.name) for f in fields(config)}
    values.update(changes)
    return EngineConfig(**values)


@dataclass(frozen=True)
class Scenario:
    """An engine config plus output paths and an optional rho sweep."""

    config: EngineConfig
    outputs: Dict[str, str] = field(default_factory=dict)
    sweep: List[Fraction] = field(default_factory=list)


_REQUIRED_KEYS = ("algorithm", "n", "cap", "rho", "beta", "horizon", "adversary")
_OPTIONAL_KEYS = (
    "algorithm_params",
    "seed",
    "strict_control_bits",
    "control_bit_factor",
    "outputs",
    "sweep",
)
_OUTPUT_KEYS = ("trace_csv", "summary_json", "aggregate_csv")


def _require_int(data: Dict[str, Any], key: str) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def parse_scenario(data: Dict[str, Any]) -> Scenario:
    """Build a Scenario from a decoded JSON document."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    unknown = sorted(set(data) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS))
    if unknown:
        raise ConfigError(f"unknown scenario keys: {', '.join(unknown)}")
    missing = [key for key in _REQUIRED_KEYS if key not in data]
    if missing:
        raise ConfigError(f"missing scenario keys: {', '.join(missing)}")

    adversary = data["adversary"]
    if isinstance(adversary, str):
        adversary = {"strategy": adversary}
    if not isinstance(adversary, dict) or "strategy" not in adversary:
        raise ConfigError("adversary must be an object with a 'strategy' key")
    adversary_params = {key: value for key, value in adversary.items() if key != "strategy"}

    algorithm_params = data.get("algorithm_params", {})
    if not isinstance(algorithm_params, dict):
        raise ConfigError("algorithm_params must be an object")

    outputs = data.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be an object")
    bad_outputs = sorted(set(outputs) - set(_OUTPUT_KEYS))
    if bad_outputs:
        raise ConfigError(f"unknown output keys: {', '.join(bad_outputs)}")

    sweep = data.get("sweep", [])
    if not isinstance(sweep, list):
        raise ConfigError("sweep must be a list of \"p/q\" strings")

    strict = data.get("strict_control_bits", False)
    if not isinstance(strict, bool):
        raise ConfigError("strict_control_bits must be true or false")

    config = EngineConfig(
        n=_require_int(data, "n"),
        energy_cap=_require_int(data, "cap"),
        horizon=_require_int(data, "horizon"),
        algorithm=str(data["algorithm"]),
        adversary=str(adversary["strategy"]),
        rho=parse_rational(data["rho"], "rho"),
        beta=parse_rational(data["beta"], "beta"),
        algorithm_params=dict(algorithm_params),
        adversary_params=adversary_params,
        seed=_require_int(data, "seed") if "seed" in data else 0,
        strict_control_bits=strict,
        control_bit_factor=_require_int(data, "control_bit_factor") if "control_bit_factor" in data else 4,
    )
    return Scenario(
        config=config,
        outputs={key: str(value) for key, value in outputs.items()},
        sweep=[parse_rational(value, "sweep rho") for value in sweep],
    )


def _beta_to_json(beta: Fraction) -> Union[int, str]:
    return beta.numerator if beta.denominator == 1 else format_rational(beta)


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Inverse of parse_scenario."""
    config = scenario.config
    adversary: Dict[str, Any] = {"strategy": config.adversary}
    adversary.update(config.adversary_params)
    data: Dict[str, Any] = {
        "algorithm": config.algorithm,
        "n": config.n,
        "cap": config.energy_cap,
        "rho": format_rational(config.rho),
        "beta": _beta_to_json(config.beta),
        "horizon": config.horizon,
        "adversary": adversary,
        "algorithm_params": dict(config.algorithm_params),
        "seed": config.seed,
        "strict_control_bits": config.strict_control_bits,
        "control_bit_factor": config.control_bit_factor,
    }
    if scenario.outputs:
        data["outputs"] = dict(scenario.outputs)
    if scenario.sweep:
        data["sweep"] = [format_rational(rho) for rho in scenario.sweep]
    return data


def config_echo(config: EngineConfig) -> Dict[str, Any]:
    """JSON-ready copy of a config, used in summaries."""
    return scenario_to_dict(Scenario(config=config))


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"scenario file {path} is not valid JSON: {e}")
    logger.debug("loaded scenario %s", path)
    return parse_scenario(data)


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), sort_keys=True, indent=2) + "\n"
