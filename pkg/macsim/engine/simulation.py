import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from macsim.adversary.injectors import AdaptiveCap2Adversary, Injector, SaturatingInjector, ScriptedInjector
from macsim.adversary.leaky_bucket import AdversaryType, read_trace
from macsim.adversary.patterns import build_pattern
from macsim.adversary.witnesses import oblivious_pair_witness, oblivious_station_witness
from macsim.algorithms import RoutingAlgorithm, create_algorithm
from macsim.config import EngineConfig
from macsim.engine.channel import Channel
from macsim.entities.packet import Packet, RoundOutcome
from macsim.errors import ConfigError
from macsim.metrics.bounds import orchestra_season_labels, stability_probe
from macsim.metrics.report import ExperimentReport, ReportRecorder
from macsim.world.schedule import extract_oblivious_schedule

logger = logging.getLogger(__name__)


def create_injector(config: EngineConfig, algorithm: RoutingAlgorithm) -> Injector:
    """Build the adversary a config names, bound to the algorithm under test."""
    params = config.adversary_params
    adversary = AdversaryType(config.rho, config.beta)
    n = config.n

    if config.adversary == "none":
        return Injector()
    if config.adversary == "saturating":
        return SaturatingInjector(adversary, build_pattern(n, params))
    if config.adversary == "scripted":
        if "trace" not in params:
            raise ConfigError("scripted adversary needs a 'trace' CSV path")
        return ScriptedInjector(read_trace(params["trace"]), adversary, n)
    if config.adversary in ("station-witness", "pair-witness"):
        schedule = extract_oblivious_schedule(algorithm)
        t = int(params.get("t", max(config.horizon, 1)))
        build = oblivious_station_witness if config.adversary == "station-witness" else oblivious_pair_witness
        witness = build(schedule, adversary, t, horizon=max(config.horizon, 1))
        algorithm.notes["witness_target"] = list(witness.target)
        algorithm.notes["witness_on_count"] = witness.on_count
        return ScriptedInjector(witness.trace)
    if config.adversary == "adaptive-cap2":
        return AdaptiveCap2Adversary(n, config.energy_cap)
    raise ConfigError(f"unknown adversary {config.adversary!r}")


class Simulation:
    """Drives one algorithm against one adversary for a fixed horizon."""

    def __init__(
        self,
        config: EngineConfig,
        injector: Optional[Injector] = None,
        algorithm: Optional[RoutingAlgorithm] = None,
    ):
        self.config = config
        self.algorithm = algorithm if algorithm is not None else create_algorithm(config)
        bit_limit = config.bit_limit if self.algorithm.name != "orchestra" else None
        self.channel = Channel(config.n, config.energy_cap, self.algorithm, bit_limit)
        self.injector = injector if injector is not None else create_injector(config, self.algorithm)
        self.recorder = ReportRecorder(config)
        self._next_id = 1

    def step(self) -> RoundOutcome:
        round_index = self.channel.round + 1
        packets = []
        for station, destination in self.injector.injections(round_index):
            packets.append(Packet(self._next_id, destination, round_index, station))
            self._next_id += 1
        outcome = self.channel.step_round(packets)
        self.injector.observe(outcome)
        self.recorder.record(outcome, self.channel.queue_sizes(), packets, self.channel.total_queued)
        return outcome

    def run(self) -> ExperimentReport:
        config = self.config
        logger.info(
            "running %s with n=%d cap=%d rho=%s beta=%s for %d rounds",
            config.algorithm, config.n, config.energy_cap, config.rho, config.beta, config.horizon,
        )
        for _ in range(config.horizon):
            self.step()
        notes = dict(self.algorithm.describe())
        notes.update(self.injector.describe())
        report = self.recorder.finish([station.on_rounds for station in self.channel.stations], notes)
        if self.algorithm.name == "orchestra":
            report.notes["season_labels"] = orchestra_season_labels(report)
        logger.info(
            "finished: %d injected, %d delivered, max queue %d",
            report.summary.injected, report.summary.delivered, report.summary.max_queue,
        )
        return report


def run_simulation(config: EngineConfig, injector: Optional[Injector] = None) -> ExperimentReport:
    return Simulation(config, injector).run()


@dataclass(frozen=True)
class AuditResult:
    ok: bool
    round: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def conservation_audit(report: ExperimentReport) -> AuditResult:
    """Replay the per-round records and check that no packet appears or vanishes."""
    live = set()
    delivered = set()
    for record in report.rounds:
        for packet_id in record.injected_ids:
            if packet_id in live or packet_id in delivered:
                return AuditResult(False, record.round, f"packet {packet_id} injected twice")
            live.add(packet_id)
        for packet_id in record.delivered_ids:
            if packet_id in delivered:
                return AuditResult(False, record.round, f"packet {packet_id} delivered twice")
            if packet_id not in live:
                return AuditResult(False, record.round, f"packet {packet_id} delivered without being injected")
            live.remove(packet_id)
            delivered.add(packet_id)
        if sum(record.station_queues) != record.total_queued:
            return AuditResult(False, record.round, "station queues do not add up to the total")
        if record.total_queued != len(live):
            return AuditResult(
                False, record.round, f"{record.total_queued} packets queued but {len(live)} injected and undelivered"
            )
    return AuditResult(True)


def probe_stability(
    config: EngineConfig,
    base_horizon: int,
    factor: Fraction = Fraction(3, 2),
    doublings: int = 2,
) -> Tuple[str, List[int]]:
    """Run the config at T, 2T, 4T, ... and classify the max queues."""
    maxima = []
    for step in range(doublings + 1):
        report = run_simulation(config.with_horizon(base_horizon * 2 ** step))
        maxima.append(report.summary.max_queue)
    verdict = stability_probe(maxima, factor)
    logger.info("stability probe for %s: %s %s", config.algorithm, verdict, maxima)
    return verdict, maxima


def queue_at(report: ExperimentReport, station: int, round_index: int) -> int:
    return report.rounds[round_index - 1].station_queues[station]

