from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import pytest

import macsim
from macsim.adversary.injectors import ScriptedInjector
from macsim.config import load_scenario
from macsim.engine.simulation import Simulation, conservation_audit, run_simulation
from macsim.metrics.bounds import BoundCheck, Verdict, evaluate_bounds, orchestra_season_labels, stability_probe
from macsim.metrics.report import (
    ROUND_CSV_HEADER,
    PacketRecord,
    RoundRecord,
    summarize,
    summary_document,
    write_round_csv,
    write_summary_json,
)


def test_summarize():
    rounds = [
        RoundRecord(round=1, total_queued=2, station_queues=(1, 1, 0), on_count=2, feedback="silent",
                    delivered_id=None, control_bits=0),
        RoundRecord(round=2, total_queued=1, station_queues=(0, 1, 0), on_count=2, feedback="heard",
                    delivered_id=1, control_bits=3),
    ]
    packets = [
        PacketRecord(id=1, injection_round=1, injection_station=0, destination=1, delivery_round=2, hop_count=1),
        PacketRecord(id=2, injection_round=1, injection_station=1, destination=2, delivery_round=None, hop_count=1),
    ]
    summary = summarize(rounds, packets, 3)
    assert (summary.injected, summary.delivered, summary.undelivered) == (2, 1, 1)
    assert summary.max_queue == 2
    assert summary.max_latency == 1
    assert summary.max_control_bits == 3
    assert summary.max_undelivered_age == 1
    assert summary.station_on_rounds == (0, 0, 0)
    assert summary.mean_on_count == 2.0
    assert rounds[1].csv_row() == (2, 1, 2, "heard", 1, 3)
    assert rounds[0].csv_row()[4] == ""


def test_empty_run_summary():
    summary = summarize([], [], 4)
    assert summary.rounds == 0
    assert summary.max_queue == 0
    assert summary.mean_on_count == 0.0


@pytest.fixture
def busy_report(make_config):
    config = make_config(adversary="saturating", rho=Fraction(1, 2), horizon=200)
    return run_simulation(config)


def test_audit_accepts_a_clean_run(busy_report):
    assert conservation_audit(busy_report)
    assert busy_report.summary.delivered > 0


def test_audit_catches_queue_drift(busy_report):
    rounds = list(busy_report.rounds)
    record = rounds[50]
    queues = list(record.station_queues)
    queues[0] += 1
    rounds[50] = replace(record, station_queues=tuple(queues))
    result = conservation_audit(replace(busy_report, rounds=rounds))
    assert not result
    assert result.round == 51
    assert "add up" in result.reason


def test_audit_catches_a_second_delivery(busy_report):
    rounds = list(busy_report.rounds)
    first = next(index for index, record in enumerate(rounds) if record.delivered_ids)
    packet_id = rounds[first].delivered_ids[0]
    later = rounds[first + 1]
    rounds[first + 1] = replace(later, delivered_ids=later.delivered_ids + (packet_id,))
    result = conservation_audit(replace(busy_report, rounds=rounds))
    assert not result
    assert result.reason == f"packet {packet_id} delivered twice"


def test_advisory_checks_never_fail():
    check = BoundCheck("adjust-window-latency", Fraction(5, 2), 3, Verdict.FAIL, advisory=True)
    assert not check.failed
    assert check.to_dict() == {
        "name": "adjust-window-latency",
        "bound": "5/2",
        "observed": 3,
        "verdict": "fail",
        "advisory": True,
        "detail": "",
    }
    assert BoundCheck("energy-cap", Fraction(2), 3, Verdict.FAIL).failed


def test_latency_check_is_skipped_at_full_rate(make_config):
    report = run_simulation(make_config(rho=Fraction(1), horizon=50))
    checks = {check.name: check for check in evaluate_bounds(report)}
    latency = checks["count-hop-latency"]
    assert latency.verdict is Verdict.NOT_APPLICABLE
    assert latency.to_dict()["bound"] is None
    assert checks["energy-cap"].verdict is Verdict.PASS
    assert checks["direct-routing-hops"].verdict is Verdict.PASS


@pytest.mark.parametrize(
    "maxima, verdict",
    [
        ([10, 15, 23], "growing"),
        ([10, 14, 30], "bounded"),
        ([0, 0, 0], "bounded"),
        ([40, 41, 40], "bounded"),
        ([5, 10, 9, 14, 21], "growing"),
    ],
)
def test_stability_probe(maxima, verdict):
    assert stability_probe(maxima) == verdict


def test_stability_probe_factor():
    assert stability_probe([100, 130, 170], Fraction(5, 4)) == "growing"
    assert stability_probe([100, 130, 170]) == "bounded"


def test_idle_orchestra_seasons_are_sparse(make_config):
    report = run_simulation(make_config(algorithm="orchestra", energy_cap=3, rho=Fraction(1), horizon=10))
    assert orchestra_season_labels(report) == ["sparse"] * 4


def test_outputs_are_byte_identical_across_runs(tmp_path, make_config):
    config = make_config(adversary="saturating", rho=Fraction(3, 4), beta=Fraction(2), horizon=300)
    for name in ("a", "b"):
        report = run_simulation(config)
        write_round_csv(report, tmp_path / f"{name}.csv")
        write_summary_json(report, evaluate_bounds(report), tmp_path / f"{name}.json")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    lines = (tmp_path / "a.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(ROUND_CSV_HEADER)
    assert len(lines) == 301


def _scenario_params():
    for path in sorted((Path(macsim.__file__).parent / "data" / "scenarios").glob("*.json")):
        horizon = load_scenario(path).config.horizon
        marks = [pytest.mark.slow] if horizon > 5000 else []
        yield pytest.param(path, id=path.stem, marks=marks)


@pytest.mark.parametrize("path", _scenario_params())
def test_shipped_scenarios_repeat_byte_for_byte(tmp_path, path):
    config = load_scenario(path).config
    for name in ("a", "b"):
        report = run_simulation(config)
        write_round_csv(report, tmp_path / f"{name}.csv")
        write_summary_json(report, evaluate_bounds(report), tmp_path / f"{name}.json")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_summary_document_echoes_the_config(busy_report):
    document = summary_document(busy_report, evaluate_bounds(busy_report))
    assert document["config"]["rho"] == "1/2"
    assert document["config"]["cap"] == 2
    assert document["summary"]["injected"] == busy_report.summary.injected
    assert {check["name"] for check in document["checks"]} >= {"energy-cap", "count-hop-latency"}


def test_empty_horizon_gives_an_empty_report(make_config):
    report = run_simulation(make_config(horizon=0))
    assert report.rounds == []
    assert report.packets == []
    assert report.summary.injected == 0
    assert conservation_audit(report)


@pytest.mark.parametrize("adversary", ["station-witness", "pair-witness"])
def test_witness_with_an_empty_horizon_gives_an_empty_report(make_config, adversary):
    config = make_config(n=5, energy_cap=2, algorithm="k-subsets", adversary=adversary, rho=Fraction(1, 2), horizon=0)
    report = run_simulation(config)
    assert report.rounds == []
    assert report.summary.injected == 0
    assert conservation_audit(report)


def test_stations_that_never_wake_keep_their_packets(make_config, make_trace):
    config = make_config(n=5, energy_cap=4, algorithm="null", horizon=20)
    injector = ScriptedInjector(make_trace([(1, 0, 1), (2, 1, 2), (3, 2, 3)]))
    report = Simulation(config, injector).run()
    assert report.rounds[-1].total_queued == 3
    assert report.summary.delivered == 0
    assert report.summary.max_on_count == 0
    assert report.summary.station_on_rounds == (0,) * 5
    assert report.summary.max_undelivered_age == 19
