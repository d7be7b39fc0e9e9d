"""Queue, latency, energy and routing checks for completed runs."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from macsim.entities.bits import ceil_log2
from macsim.metrics.report import ExperimentReport

logger = logging.getLogger(__name__)

PLAIN_PACKET_ALGORITHMS = ("adjust-window", "k-cycle", "k-clique")
DIRECT_ROUTING_ALGORITHMS = ("orchestra", "count-hop", "k-clique", "k-subsets")


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class BoundCheck:
    name: str
    bound: Optional[Fraction]
    observed: int
    verdict: Verdict
    advisory: bool = False
    detail: str = ""

    @property
    def failed(self) -> bool:
        """A failure that should fail the run; advisory checks never do."""
        return self.verdict is Verdict.FAIL and not self.advisory

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "bound": None if self.bound is None else f"{self.bound.numerator}/{self.bound.denominator}",
            "observed": self.observed,
            "verdict": self.verdict.value,
            "advisory": self.advisory,
            "detail": self.detail,
        }


def _check(name: str, bound: Fraction, observed: int, applicable: bool = True, advisory: bool = False, detail: str = "") -> BoundCheck:
    if not applicable:
        return BoundCheck(name, bound, observed, Verdict.NOT_APPLICABLE, advisory, detail)
    verdict = Verdict.PASS if observed <= bound else Verdict.FAIL
    return BoundCheck(name, bound, observed, verdict, advisory, detail)


def evaluate_bounds(report: ExperimentReport) -> List[BoundCheck]:
    """All checks that apply to the report's algorithm."""
    config = report.config
    summary = report.summary
    n, cap = config.n, config.energy_cap
    rho, beta = config.rho, config.beta
    algorithm = config.algorithm
    notes = report.notes
    checks = [_check("energy-cap", Fraction(cap), summary.max_on_count)]

    if algorithm == "orchestra":
        checks.append(_check("orchestra-queue", Fraction(2 * n ** 3) + beta, summary.max_queue))
        checks.append(
            _check(
                "orchestra-full-big-seasons-without-light-rounds",
                Fraction(0),
                int(notes.get("full_big_seasons_with_light_rounds", 0)),
            )
        )
    elif algorithm == "count-hop":
        applicable = rho < 1
        bound = 2 * (n ** 2 + beta) / (1 - rho) if applicable else None
        checks.append(_check("count-hop-latency", bound, summary.max_latency, applicable))
    elif algorithm == "adjust-window":
        applicable = rho < 1
        log_n = ceil_log2(n)
        bound = (18 * n ** 3 * log_n ** 2 + 2 * beta) / (1 - rho) if applicable else None
        checks.append(_check("adjust-window-latency", bound, summary.max_latency, applicable, advisory=True,
                             detail="closed form holds for sufficiently large n"))
        final_window = notes.get("final_window")
        if final_window:
            checks.append(_check("adjust-window-latency-vs-window", Fraction(2 * final_window), summary.max_latency,
                                 advisory=True, detail="delay within two final windows"))
    elif algorithm == "k-cycle":
        k = int(notes.get("effective_k", cap))
        applicable = rho < Fraction(k - 1, n - 1)
        checks.append(_check("k-cycle-latency", (32 + beta) * n, summary.max_latency, applicable))
        groups = int(notes.get("groups", n))
        checks.append(_check("k-cycle-hops", Fraction(groups), summary.max_hops))
    elif algorithm == "k-clique":
        k = int(notes.get("effective_k", cap))
        applicable = rho <= Fraction(k * k, 2 * n * (2 * n - k))
        bound = 8 * Fraction(n * n, k) * (1 + beta / (2 * k))
        checks.append(_check("k-clique-latency", bound, summary.max_latency, applicable))
    elif algorithm == "k-subsets":
        applicable = rho <= Fraction(cap * (cap - 1), n * (n - 1)) and notes.get("withholding", "mbtf") == "mbtf"
        bound = 2 * math.comb(n, cap) * (n ** 2 + beta)
        checks.append(_check("k-subsets-queue", bound, summary.max_queue, applicable))
        checks.append(_check("k-subsets-balance", Fraction(1), int(notes.get("max_allocation_spread", 0))))

    if algorithm in PLAIN_PACKET_ALGORITHMS:
        checks.append(_check("plain-packet-bits", Fraction(0), summary.max_control_bits))
    if algorithm in DIRECT_ROUTING_ALGORITHMS:
        checks.append(_check("direct-routing-hops", Fraction(1), summary.max_hops))

    for check in checks:
        if check.failed:
            logger.warning("check %s failed: observed %d > %s", check.name, check.observed, check.bound)
    return checks


def stability_probe(max_queues: Sequence[int], factor: Fraction = Fraction(3, 2)) -> str:
    """'growing' iff the max queue rises by `factor` twice in a row across horizons."""
    streak = 0
    for previous, current in zip(max_queues, max_queues[1:]):
        if current > 0 and current >= factor * previous:
            streak += 1
            if streak >= 2:
                return "growing"
        else:
            streak = 0
    return "bounded"


def orchestra_season_labels(report: ExperimentReport) -> List[str]:
    """Dense/sparse label per season from the total queue at its start."""
    n = report.config.n
    threshold = n ** 3 - 2 * n + 1
    season = n - 1
    labels = []
    for start in range(1, len(report.rounds) + 1, season):
        queued = report.rounds[start - 2].total_queued if start > 1 else 0
        labels.append("dense" if queued > threshold else "sparse")
    return labels
