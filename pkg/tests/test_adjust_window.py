from fractions import Fraction

import pytest

from macsim.adversary.injectors import ScriptedInjector
from macsim.algorithms import AdjustWindow
from macsim.algorithms.adjust_window import (
    GossipRecord,
    WindowShape,
    coded_transfer,
    decode_transfer,
    initial_window,
    main_listen_intervals,
)
from macsim.config import load_scenario
from macsim.engine.simulation import Simulation, conservation_audit, run_simulation
from macsim.entities.bits import encode_uint, lg
from macsim.errors import StageOverflow
from macsim.metrics.bounds import evaluate_bounds


@pytest.mark.parametrize("n, expected", [(3, 6318), (4, 16128), (5, 36000)])
def test_initial_window(n, expected):
    assert initial_window(n) == expected


@pytest.mark.parametrize("n", range(3, 9))
def test_initial_window_is_the_smallest_that_fits(n):
    window = initial_window(n)
    assert window >= 18 * n ** 3 * lg(window)
    assert window - 1 < 18 * n ** 3 * lg(window - 1)


def test_stage_lengths():
    shape = WindowShape.build(3, 1, 4096)
    assert (shape.lg, shape.gossip_phase, shape.gossip, shape.auxiliary, shape.main) == (13, 41, 369, 2808, 919)
    assert shape.end == 4097
    with pytest.raises(StageOverflow):
        WindowShape.build(3, 1, 2048)
    with pytest.raises(StageOverflow):
        AdjustWindow(3, 2, initial=2048)


def test_coded_transfer_round_trips_every_count_up_to_the_window():
    window = initial_window(4)
    width = lg(window)
    for value in range(window + 1):
        bits = encode_uint(value, width)
        rounds = coded_transfer(bits)
        assert len(rounds) == width
        assert decode_transfer(rounds) == bits


def test_main_listen_intervals_follow_source_order():
    records = {
        0: GossipRecord(True, False, 5, to_listener=2, below_listener=3),
        1: GossipRecord(True, False, 4, to_listener=1, below_listener=2),
        2: GossipRecord(True, False, 6),
        3: GossipRecord(False),
    }
    assert main_listen_intervals(records, 2, 100) == [(3, 5), (7, 8)]
    assert main_listen_intervals(records, 2, 7) == [(3, 5)]


def adjust_window_config(make_config, horizon, **overrides):
    return make_config(
        n=3,
        energy_cap=2,
        algorithm="adjust-window",
        algorithm_params={"initial_window": 4096},
        horizon=horizon,
        **overrides,
    )


def test_large_station_empties_its_queue_in_the_main_stage(make_config, make_trace):
    config = adjust_window_config(make_config, 4800)
    rows = [(4096, 0, 1 + serial % 2) for serial in range(240)]
    report = Simulation(config, ScriptedInjector(make_trace(rows))).run()
    assert report.summary.delivered == 240
    # Window 2 starts at 4097; its Main stage opens after 9 gossip phases of 41 rounds
    assert all(4097 <= record.delivery_round < 4466 + 240 for record in report.packets)
    assert report.summary.max_hops == 1
    assert report.summary.max_control_bits == 0
    assert report.notes["doublings"] == []
    assert report.notes["windows"] == 2


def test_window_doubles_when_main_cannot_hold_the_backlog(make_config, make_trace):
    config = adjust_window_config(make_config, 8200)
    rows = [(4096, 0, 1 + serial % 2) for serial in range(1000)]
    report = Simulation(config, ScriptedInjector(make_trace(rows))).run()
    assert report.notes["doublings"] == [8193]
    assert report.notes["final_window"] == 8192
    assert conservation_audit(report)


def test_light_load_is_carried_by_the_auxiliary_stage(make_config):
    config = adjust_window_config(make_config, 3 * 4096, adversary="saturating", rho=Fraction(1, 20))
    report = run_simulation(config)
    assert report.notes["doublings"] == []
    assert report.summary.max_latency <= 2 * 4096
    assert report.summary.max_control_bits == 0
    assert report.summary.max_on_count <= 2
    assert not [check.name for check in evaluate_bounds(report) if check.failed]
    assert conservation_audit(report)


@pytest.mark.slow
def test_shipped_scenario_never_doubles(data_dir):
    config = load_scenario(data_dir / "scenarios" / "adjust_window_n4.json").config
    assert config.horizon >= 4 * initial_window(4)
    report = run_simulation(config)
    assert report.notes["doublings"] == []
    assert report.summary.max_latency <= 2 * report.notes["final_window"]
    assert report.summary.max_control_bits == 0
    checks = {check.name: check for check in evaluate_bounds(report)}
    assert checks["adjust-window-latency"].advisory
    assert not [check.name for check in checks.values() if check.failed]


@pytest.mark.slow
def test_five_stations_never_double(make_config):
    window = initial_window(5)
    config = make_config(
        n=5,
        energy_cap=2,
        algorithm="adjust-window",
        adversary="saturating",
        rho=Fraction(1, 10),
        beta=Fraction(2),
        horizon=4 * window,
    )
    report = run_simulation(config)
    assert report.notes["doublings"] == []
    assert report.summary.max_latency <= 2 * window
    assert report.summary.max_control_bits == 0
