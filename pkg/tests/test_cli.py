import json

import pytest

from macsim.adversary.leaky_bucket import AdversaryType, read_trace, validate_trace
from macsim.config import parse_rational
from macsim.engine.cli import AGGREGATE_HEADER, EXIT_CONFIG, EXIT_FAILED, EXIT_OK, main


def write_scenario(path, **overrides):
    data = {
        "algorithm": "count-hop",
        "n": 4,
        "cap": 2,
        "rho": "1/2",
        "beta": 1,
        "horizon": 300,
        "adversary": {"strategy": "saturating", "pattern": "round-robin"},
    }
    data.update(overrides)
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_layout_prints_the_golden_document(capsys, data_dir):
    assert main(["layout", "k-cycle", "--n", "7", "--k", "3"]) == EXIT_OK
    golden = (data_dir / "layouts" / "k_cycle_n7_k3.json").read_text(encoding="utf-8")
    assert capsys.readouterr().out == golden


def test_layout_refuses_bad_parameters(monkeypatch, capsys):
    monkeypatch.setenv("MACSIM_MAX_GAMMA", "5")
    assert main(["layout", "k-subsets", "--n", "5", "--k", "2"]) == EXIT_CONFIG
    assert "exceeds the limit 5" in capsys.readouterr().err
    assert main(["layout", "k-cycle", "--n", "7", "--k", "7"]) == EXIT_CONFIG


def test_validate_trace_reports_the_first_violation(tmp_path, capsys):
    trace = tmp_path / "burst.csv"
    trace.write_text("round,station,destination\n" + "1,0,1\n" * 4, encoding="utf-8")
    assert main(["validate-trace", str(trace), "--rho", "1/2", "--beta", "2"]) == EXIT_FAILED
    assert capsys.readouterr().out.strip() == "interval [1, 1] holds 4 injections, allowance 5/2"

    trace.write_text("round,station,destination\n1,0,1\n1,1,0\n3,2,1\n", encoding="utf-8")
    assert main(["validate-trace", str(trace), "--rho", "1/2", "--beta", "2"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "trace is admissible"


def test_decimal_rates_are_rejected(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    trace.write_text("round,station,destination\n1,0,1\n", encoding="utf-8")
    assert main(["validate-trace", str(trace), "--rho", "0.5", "--beta", "1"]) == EXIT_CONFIG
    assert "p/q" in capsys.readouterr().err


def test_run_writes_trace_and_summary(tmp_path):
    scenario = write_scenario(tmp_path / "scenario.json")
    trace, summary = tmp_path / "rounds.csv", tmp_path / "summary.json"
    assert main(["run", str(scenario), "--trace", str(trace), "--summary", str(summary)]) == EXIT_OK
    assert len(trace.read_text(encoding="utf-8").splitlines()) == 301
    document = json.loads(summary.read_text(encoding="utf-8"))
    assert document["config"]["algorithm"] == "count-hop"
    assert document["summary"]["rounds"] == 300
    assert all(not check["verdict"] == "fail" for check in document["checks"])


def test_run_prints_the_summary_without_outputs(tmp_path, capsys):
    scenario = write_scenario(tmp_path / "scenario.json", horizon=50)
    assert main(["run", str(scenario)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["summary"]["rounds"] == 50


def test_run_reports_configuration_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err
    scenario = write_scenario(tmp_path / "scenario.json", cap=4)
    assert main(["run", str(scenario)]) == EXIT_CONFIG


def test_run_aborts_when_the_cap_is_too_small(tmp_path, capsys):
    scenario = write_scenario(tmp_path / "scenario.json", algorithm="orchestra")
    assert main(["run", str(scenario)]) == EXIT_FAILED
    assert "run aborted" in capsys.readouterr().err


def test_sweep_writes_one_row_per_rate(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    scenario = write_scenario(
        tmp_path / "sweep.json",
        sweep=["1/4", "1/2"],
        outputs={"summary_json": "summary.json", "aggregate_csv": "aggregate.csv"},
    )
    assert main(["sweep", str(scenario)]) == EXIT_OK
    lines = (tmp_path / "aggregate.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(AGGREGATE_HEADER)
    assert len(lines) == 3
    assert lines[1].startswith("count-hop,4,2,1/4,1/1,300,")
    assert lines[2].endswith(",true")
    assert (tmp_path / "summary_rho1-4.json").exists()
    assert (tmp_path / "summary_rho1-2.json").exists()


def test_sweep_needs_a_sweep_list(tmp_path):
    scenario = write_scenario(tmp_path / "scenario.json")
    assert main(["sweep", str(scenario)]) == EXIT_CONFIG
    swept = write_scenario(tmp_path / "swept.json", sweep=["1/4"])
    assert main(["sweep", str(swept), "--jobs", "0"]) == EXIT_CONFIG


def test_witness_trace_is_admissible(tmp_path, capsys):
    out = tmp_path / "witness.csv"
    argv = ["witness", "k-cycle", "--n", "7", "--k", "3", "--rho", "1/2", "--t", "700", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert "target" in capsys.readouterr().err
    trace = read_trace(out)
    assert validate_trace(trace, AdversaryType(parse_rational("1/2"), parse_rational("1")))
    assert {station for _, station, _ in trace.rows()} <= {1, 3, 5}


def test_witness_refuses_a_rate_below_the_threshold(capsys):
    argv = ["witness", "k-cycle", "--n", "7", "--k", "3", "--rho", "1/3", "--t", "700"]
    assert main(argv) == EXIT_CONFIG
    assert "must exceed" in capsys.readouterr().err


def test_pair_witness_prints_to_stdout(capsys):
    argv = ["witness", "k-clique", "--n", "8", "--k", "4", "--rho", "1/4", "--t", "60", "--kind", "pair"]
    assert main(argv) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "round,station,destination"
    assert len(lines) > 1


def test_pair_witness_covers_k_subsets(tmp_path, capsys):
    out = tmp_path / "pairs.csv"
    argv = ["witness", "k-subsets", "--n", "5", "--k", "2", "--rho", "1/5", "--t", "500", "--kind", "pair", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert "on 50 of 500 rounds" in capsys.readouterr().err
    trace = read_trace(out)
    assert trace.total > 0
    assert validate_trace(trace, AdversaryType(parse_rational("1/5"), parse_rational("1")))
    assert len({(station, destination) for _, station, destination in trace.rows()}) == 1


def test_unknown_command_exits_through_argparse():
    with pytest.raises(SystemExit):
        main(["teleport"])
