"""Lower-bound adversaries against energy-oblivious schedules.

Both witnesses count station-rounds on the materialized schedule: with at
most k stations on per round, some station is on in at most k*t/n rounds of
[1, t], and some ordered pair is jointly on in at most k(k-1)*t/(n(n-1)).
Flooding that station (or pair) faster than it can drain builds a queue
under any algorithm obeying the schedule.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from macsim.adversary.leaky_bucket import AdversaryType, InjectionTrace, saturating_counts, validate_trace
from macsim.adversary.patterns import SinglePairPattern, SingleTargetPattern
from macsim.errors import AdversaryError, RateTooLow
from macsim.world.schedule import ObliviousSchedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WitnessResult:
    target: Tuple[int, ...]
    on_count: int
    threshold: Fraction
    residual_bound: Fraction
    trace: InjectionTrace


def _flood(adversary: AdversaryType, pattern, horizon: int) -> InjectionTrace:
    trace = InjectionTrace.from_counts(saturating_counts(adversary, horizon), pattern)
    if not validate_trace(trace, adversary):
        raise AdversaryError("witness produced an inadmissible trace")
    return trace


def oblivious_station_witness(
    schedule: ObliviousSchedule,
    adversary: AdversaryType,
    t: int,
    horizon: Optional[int] = None,
) -> WitnessResult:
    """Flood the station that is on least often within [1, t]."""
    n, k = schedule.n, schedule.cap
    threshold = Fraction(k, n)
    if adversary.rho <= threshold:
        raise RateTooLow(f"rho={adversary.rho} must exceed k/n={threshold}")
    if t < 1:
        raise AdversaryError(f"witness interval must be positive, got {t}")

    on_counts = schedule.on_counts(t)
    station = int(on_counts.argmin())
    on_count = int(on_counts[station])
    if on_count * n > k * t:
        raise AdversaryError(f"station {station} is on {on_count} times, above k*t/n; the schedule breaks the cap")
    logger.info("station witness: station %d on %d of %d rounds", station, on_count, t)

    trace = _flood(adversary, SingleTargetPattern(n, station), horizon or t)
    return WitnessResult(
        target=(station,),
        on_count=on_count,
        threshold=threshold,
        residual_bound=t * (adversary.rho - threshold) - adversary.beta,
        trace=trace,
    )


def oblivious_pair_witness(
    schedule: ObliviousSchedule,
    adversary: AdversaryType,
    t: int,
    horizon: Optional[int] = None,
) -> WitnessResult:
    """Flood the ordered pair (w, z) that is jointly on least often within [1, t].

    Ties go to the pair whose stations are on least often in total, then to
    the lexicographically smallest pair.
    """
    n, k = schedule.n, schedule.cap
    threshold = Fraction(k * (k - 1), n * (n - 1))
    if adversary.rho <= threshold:
        raise RateTooLow(f"rho={adversary.rho} must exceed k(k-1)/(n(n-1))={threshold}")
    if t < 1:
        raise AdversaryError(f"witness interval must be positive, got {t}")

    joint = schedule.joint_on_counts(t)
    on_counts = joint.diagonal()
    candidates = [
        (int(joint[w, z]), int(on_counts[w] + on_counts[z]), w, z)
        for w in range(n)
        for z in range(n)
        if w != z
    ]
    on_count, _, w, z = min(candidates)
    if on_count * n * (n - 1) > k * (k - 1) * t:
        raise AdversaryError(f"pair ({w}, {z}) is jointly on {on_count} times, above the double-counting bound")
    logger.info("pair witness: pair (%d, %d) jointly on %d of %d rounds", w, z, on_count, t)

    trace = _flood(adversary, SinglePairPattern(n, w, z), horizon or t)
    return WitnessResult(
        target=(w, z),
        on_count=on_count,
        threshold=threshold,
        residual_bound=t * (adversary.rho - threshold) - adversary.beta,
        trace=trace,
    )
