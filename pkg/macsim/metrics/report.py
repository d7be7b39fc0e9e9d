import csv
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from macsim.config import EngineConfig, config_echo
from macsim.entities.packet import Packet, RoundOutcome

ROUND_CSV_HEADER = ("round", "total_queued", "on_count", "feedback", "delivered_id", "control_bits")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    total_queued: int
    station_queues: Tuple[int, ...]
    on_count: int
    feedback: str
    delivered_id: Optional[int]
    control_bits: int
    injected_ids: Tuple[int, ...] = ()
    # Includes self-addressed packets delivered on injection
    delivered_ids: Tuple[int, ...] = ()

    def csv_row(self) -> Tuple[Any, ...]:
        delivered = "" if self.delivered_id is None else self.delivered_id
        return (self.round, self.total_queued, self.on_count, self.feedback, delivered, self.control_bits)


@dataclass(frozen=True)
class PacketRecord:
    id: int
    injection_round: int
    injection_station: int
    destination: int
    delivery_round: Optional[int]
    hop_count: int

    @property
    def delay(self) -> Optional[int]:
        if self.delivery_round is None:
            return None
        return self.delivery_round - self.injection_round


@dataclass(frozen=True)
class Summary:
    rounds: int
    injected: int
    delivered: int
    undelivered: int
    max_queue: int
    max_latency: int
    max_on_count: int
    max_control_bits: int
    max_hops: int
    max_undelivered_age: int
    station_on_rounds: Tuple[int, ...]
    mean_on_count: float


@dataclass(frozen=True)
class ExperimentReport:
    config: EngineConfig
    rounds: List[RoundRecord]
    packets: List[PacketRecord]
    summary: Summary
    notes: Dict[str, Any] = field(default_factory=dict)


class ReportRecorder:
    """Accumulates round and packet records while a simulation runs."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.rounds: List[RoundRecord] = []
        self.packets: List[Packet] = []

    def record(
        self,
        outcome: RoundOutcome,
        station_queues: Sequence[int],
        injected: Sequence[Packet],
        total_queued: Optional[int] = None,
    ):
        self.packets.extend(injected)
        delivered_ids = tuple(packet.id for packet in outcome.instant_deliveries)
        if outcome.delivered is not None:
            delivered_ids += (outcome.delivered.id,)
        queues = tuple(station_queues)
        self.rounds.append(
            RoundRecord(
                round=outcome.round,
                total_queued=sum(queues) if total_queued is None else total_queued,
                station_queues=queues,
                on_count=len(outcome.on_stations),
                feedback=outcome.feedback.value,
                delivered_id=outcome.delivered.id if outcome.delivered is not None else None,
                control_bits=outcome.control_bits,
                injected_ids=tuple(packet.id for packet in injected),
                delivered_ids=delivered_ids,
            )
        )

    def finish(self, station_on_rounds: Sequence[int], notes: Dict[str, Any]) -> ExperimentReport:
        packets = [
            PacketRecord(
                id=packet.id,
                injection_round=packet.injection_round,
                injection_station=packet.injection_station,
                destination=packet.destination,
                delivery_round=packet.delivery_round,
                hop_count=len(packet.hops),
            )
            for packet in self.packets
        ]
        summary = summarize(self.rounds, packets, self.config.n, station_on_rounds)
        return ExperimentReport(config=self.config, rounds=self.rounds, packets=packets, summary=summary, notes=notes)


def summarize(
    rounds: Sequence[RoundRecord],
    packets: Sequence[PacketRecord],
    n: int,
    station_on_rounds: Optional[Sequence[int]] = None,
) -> Summary:
    horizon = len(rounds)
    delivered = [packet for packet in packets if packet.delivery_round is not None]
    undelivered = [packet for packet in packets if packet.delivery_round is None]
    total_on = sum(record.on_count for record in rounds)
    mean_on = float(Fraction(total_on, horizon)) if horizon else 0.0
    return Summary(
        rounds=horizon,
        injected=len(packets),
        delivered=len(delivered),
        undelivered=len(undelivered),
        max_queue=max((record.total_queued for record in rounds), default=0),
        max_latency=max((packet.delay for packet in delivered), default=0),
        max_on_count=max((record.on_count for record in rounds), default=0),
        max_control_bits=max((record.control_bits for record in rounds), default=0),
        max_hops=max((packet.hop_count for packet in delivered), default=0),
        max_undelivered_age=max((horizon - packet.injection_round for packet in undelivered), default=0),
        station_on_rounds=tuple(station_on_rounds) if station_on_rounds is not None else (0,) * n,
        mean_on_count=round(mean_on, 6),
    )


def write_round_csv(report: ExperimentReport, path: Union[str, Path]):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ROUND_CSV_HEADER)
        for record in report.rounds:
            writer.writerow(record.csv_row())


def summary_document(report: ExperimentReport, checks: Sequence[Any] = ()) -> Dict[str, Any]:
    summary = asdict(report.summary)
    summary["station_on_rounds"] = list(report.summary.station_on_rounds)
    return {
        "config": config_echo(report.config),
        "summary": summary,
        "checks": [check.to_dict() for check in checks],
        "notes": report.notes,
    }


def summary_json(report: ExperimentReport, checks: Sequence[Any] = ()) -> str:
    return json.dumps(summary_document(report, checks), sort_keys=True, indent=2) + "\n"


def write_summary_json(report: ExperimentReport, checks: Sequence[Any], path: Union[str, Path]):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(summary_json(report, checks))
