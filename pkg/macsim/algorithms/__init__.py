# macsim - routing algorithms
from macsim.algorithms.adjust_window import AdjustWindow
from macsim.algorithms.base import NullAlgorithm, PeriodicSchedule, RoutingAlgorithm
from macsim.algorithms.count_hop import CountHop
from macsim.algorithms.k_clique import KClique
from macsim.algorithms.k_cycle import KCycle
from macsim.algorithms.k_subsets import KSubsets
from macsim.algorithms.orchestra import Orchestra
from macsim.config import EngineConfig, max_gamma
from macsim.errors import ConfigError

_ACCEPTED_PARAMS = {
    "adjust-window": ("initial_window",),
    "k-subsets": ("withholding", "mbtf_threshold"),
}


def create_algorithm(config: EngineConfig) -> RoutingAlgorithm:
    """Instantiate the algorithm a config names."""
    params = dict(config.algorithm_params)
    unknown = sorted(set(params) - set(_ACCEPTED_PARAMS.get(config.algorithm, ())))
    if unknown:
        raise ConfigError(f"{config.algorithm} does not accept parameters: {', '.join(unknown)}")

    n, cap = config.n, config.energy_cap
    if config.algorithm == "orchestra":
        return Orchestra(n, cap)
    if config.algorithm == "count-hop":
        return CountHop(n, cap, config.horizon, config.beta)
    if config.algorithm == "adjust-window":
        initial = params.get("initial_window")
        return AdjustWindow(n, cap, int(initial) if initial is not None else None)
    if config.algorithm == "k-cycle":
        return KCycle(n, cap)
    if config.algorithm == "k-clique":
        return KClique(n, cap)
    if config.algorithm == "k-subsets":
        threshold = params.get("mbtf_threshold")
        return KSubsets(
            n,
            cap,
            max_gamma(),
            withholding=params.get("withholding", "mbtf"),
            mbtf_threshold=int(threshold) if threshold is not None else None,
        )
    if config.algorithm == "null":
        return NullAlgorithm(n, cap)
    raise ConfigError(f"unknown algorithm {config.algorithm!r}")


__all__ = [
    "AdjustWindow",
    "CountHop",
    "KClique",
    "KCycle",
    "KSubsets",
    "NullAlgorithm",
    "Orchestra",
    "PeriodicSchedule",
    "RoutingAlgorithm",
    "create_algorithm",
]
