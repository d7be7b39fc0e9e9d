from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macsim.adversary.injectors import ScriptedInjector
from macsim.algorithms import KSubsets, create_algorithm
from macsim.config import load_scenario
from macsim.engine.simulation import Simulation, conservation_audit, probe_stability, run_simulation
from macsim.entities.packet import Packet
from macsim.entities.station import Station
from macsim.errors import ConfigError
from macsim.metrics.bounds import evaluate_bounds


def bound_algorithm(n, k, **kwargs):
    algorithm = KSubsets(n, k, 10000, **kwargs)
    algorithm.bind([Station(name) for name in range(n)])
    return algorithm


@settings(max_examples=50)
@given(batches=st.lists(st.lists(st.integers(1, 5), max_size=30), min_size=1, max_size=6))
def test_allocation_keeps_thread_loads_balanced(batches):
    algorithm = bound_algorithm(6, 3)
    station = algorithm.queue(0)
    serial = 0
    phase_start = 1
    for batch in batches:
        for destination in batch:
            serial += 1
            station.enqueue(Packet(serial, destination, phase_start, 0), phase_start)
        phase_start += algorithm.layout.gamma
        for packet_id, thread in algorithm.allocate(0, phase_start):
            packet = next(p for p in station if p.id == packet_id)
            assert {0, packet.destination} <= set(algorithm.layout.subsets[thread])
        assert algorithm.allocation_spread(0) <= 1
    assert len(algorithm.allocation[0]) == serial


def test_packets_are_allocated_only_after_their_phase():
    algorithm = bound_algorithm(5, 2)
    algorithm.queue(0).enqueue(Packet(1, 1, 3, 0), 3)
    assert algorithm.allocate(0, 1) == []
    assert algorithm.allocate(0, 11) == [(1, 0)]
    assert algorithm.allocate(0, 21) == []


def test_on_sets_cycle_through_the_subsets():
    algorithm = KSubsets(5, 2, 10000)
    assert algorithm.period == 10
    assert algorithm.on_set(1) == frozenset({0, 1})
    assert algorithm.on_set(8) == frozenset({2, 3})
    assert algorithm.on_set(11) == frozenset({0, 1})


@pytest.mark.parametrize("withholding, bits", [("mbtf", 1), ("rrw", 0)])
def test_packet_waits_one_phase_then_goes_out(make_config, make_trace, withholding, bits):
    config = make_config(
        n=5, energy_cap=2, algorithm="k-subsets", algorithm_params={"withholding": withholding}, horizon=40
    )
    report = Simulation(config, ScriptedInjector(make_trace([(1, 0, 1)]))).run()
    (record,) = report.packets
    # Allocated at the phase starting in round 11; station 0 holds the thread 0 token again at round 21
    assert record.delivery_round == 21
    assert record.hop_count == 1
    assert report.summary.max_control_bits == bits
    assert report.notes["withholding"] == withholding


@pytest.mark.parametrize("withholding", ["mbtf", "rrw"])
def test_delivered_packets_leave_the_allocation(make_config, make_trace, withholding):
    config = make_config(
        n=5, energy_cap=2, algorithm="k-subsets", algorithm_params={"withholding": withholding}, horizon=40
    )
    simulation = Simulation(config, ScriptedInjector(make_trace([(1, 0, 1), (2, 0, 2)])))
    for _ in range(20):
        simulation.step()
    assert simulation.algorithm.allocation[0] == {1: 0, 2: 1}
    simulation.run()
    assert all(not allocation for allocation in simulation.algorithm.allocation)
    assert simulation.channel.total_queued == 0


def test_unknown_withholding_mode_is_refused(make_config):
    with pytest.raises(ConfigError, match="withholding"):
        KSubsets(5, 2, 10000, withholding="lifo")
    with pytest.raises(ConfigError):
        KSubsets(5, 2, 10000, mbtf_threshold=0)
    with pytest.raises(ConfigError, match="does not accept"):
        create_algorithm(make_config(n=5, algorithm="k-subsets", algorithm_params={"order": "fifo"}))


def test_thread_count_is_limited_from_the_environment(monkeypatch, make_config):
    monkeypatch.setenv("MACSIM_MAX_GAMMA", "5")
    with pytest.raises(ConfigError, match="10"):
        create_algorithm(make_config(n=5, algorithm="k-subsets"))
    monkeypatch.setenv("MACSIM_MAX_GAMMA", "10")
    assert create_algorithm(make_config(n=5, algorithm="k-subsets")).layout.gamma == 10


@pytest.mark.slow
def test_shipped_scenario_keeps_queues_bounded(data_dir):
    config = load_scenario(data_dir / "scenarios" / "k_subsets_n5.json").config
    report = run_simulation(config)
    assert report.summary.max_queue <= 520
    assert report.notes["max_allocation_spread"] <= 1
    assert report.summary.max_hops == 1
    assert report.summary.max_on_count <= 2
    assert not [check.name for check in evaluate_bounds(report) if check.failed]
    assert conservation_audit(report)


@pytest.mark.slow
def test_pair_witness_defeats_k_subsets(data_dir):
    config = load_scenario(data_dir / "scenarios" / "k_subsets_witness_n5.json").config
    report = run_simulation(config)
    assert len(report.notes["witness_target"]) == 2
    verdict, maxima = probe_stability(replace(config, adversary_params={}), 1000)
    assert verdict == "growing"
    assert maxima[0] < maxima[1] < maxima[2]
