import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from macsim.engine.simulation import Simulation
from macsim.errors import ConfigError, Degenerate
from macsim.world.layouts import build_group_layout, build_pair_layout, build_thread_layout
from macsim.world.schedule import extract_oblivious_schedule

GOLDENS = [
    ("k_cycle_n7_k3.json", lambda: build_group_layout(7, 3)),
    ("k_cycle_n6_k4.json", lambda: build_group_layout(6, 4)),
    ("k_cycle_n5_k2.json", lambda: build_group_layout(5, 2)),
    ("k_clique_n8_k4.json", lambda: build_pair_layout(8, 4)),
    ("k_subsets_n5_k2.json", lambda: build_thread_layout(5, 2, 10000)),
]


@pytest.mark.parametrize("filename, build", GOLDENS)
def test_layouts_match_golden_files(data_dir, filename, build):
    text = (data_dir / "layouts" / filename).read_text(encoding="utf-8")
    layout = build().to_dict()
    assert layout == json.loads(text)
    assert json.dumps(layout, sort_keys=True, indent=2) + "\n" == text


def test_group_layout_wraps_through_station_zero():
    layout = build_group_layout(7, 3)
    assert layout.groups[-1] == (6, 0, None)
    assert layout.members(3) == (0, 6)
    assert [layout.connector(g) for g in range(layout.length)] == [2, 4, 6, 0]
    assert layout.delta == 18
    assert layout.period == 72
    assert [layout.active_group(r) for r in (1, 18, 19, 72, 73)] == [0, 0, 1, 3, 0]


def test_group_layout_reduces_large_k():
    layout = build_group_layout(6, 4)
    assert layout.effective_k == 3
    assert layout.k == 4


def test_packets_follow_the_cycle_to_their_destination():
    layout = build_group_layout(7, 3)
    assert layout.route_group(1, 2) == 0
    assert layout.route_group(1, 5) == 0
    assert layout.route_group(2, 5) == 1
    assert layout.route_group(4, 5) == 2
    assert layout.route_group(6, 1) == 3
    assert layout.forward_group(0) == 0


@given(n=st.integers(3, 20), data=st.data())
def test_consecutive_groups_share_exactly_their_connector(n, data):
    k = data.draw(st.integers(2, n - 1))
    layout = build_group_layout(n, k)
    assert 2 * layout.effective_k <= n + 1
    covered = set()
    for group in range(layout.length):
        following = (group + 1) % layout.length
        shared = set(layout.members(group)) & set(layout.members(following))
        assert shared == {layout.connector(group)}
        assert len(layout.groups[group]) == layout.effective_k
        covered.update(layout.members(group))
    assert covered == set(range(n))
    for station in range(n):
        assert 1 <= len(layout.groups_of(station)) <= 2


@pytest.mark.parametrize("n, k", [(2, 2), (7, 1), (7, 7)])
def test_degenerate_parameters(n, k):
    with pytest.raises(Degenerate):
        build_group_layout(n, k)
    with pytest.raises(Degenerate):
        build_pair_layout(n, k)
    with pytest.raises(Degenerate):
        build_thread_layout(n, k, 10000)


def test_pair_layout_repairs_k():
    assert build_pair_layout(8, 6).effective_k == 4
    layout = build_pair_layout(7, 5)
    assert layout.effective_k == 2
    assert len(layout.sets) == 7
    assert len(layout.pairs) == 21


def test_pairs_carry_packets_between_their_sets():
    layout = build_pair_layout(8, 4)
    assert layout.pairs_for(0, 3) == [0]
    assert layout.pairs_for(0, 1) == [0, 1, 2]
    assert layout.pairs_for(7, 4) == [5]
    assert layout.members(5) == (4, 5, 6, 7)
    assert layout.active_pair(7) == 0


def test_thread_layout():
    layout = build_thread_layout(5, 2, 10000)
    assert layout.gamma == 10
    assert layout.eligible(0, 1) == [0]
    assert layout.eligible(3, 2) == [7]
    assert layout.threads_of(0) == [0, 1, 2, 3]
    assert layout.thread_of(11) == 0
    assert build_thread_layout(6, 3, 10000).eligible(0, 1) == [0, 1, 2, 3]


def test_thread_layout_refuses_too_many_threads():
    with pytest.raises(ConfigError, match="184756"):
        build_thread_layout(20, 10, 10000)


@pytest.mark.parametrize(
    "algorithm, n, k",
    [
        ("k-cycle", 7, 3),
        ("k-cycle", 6, 4),
        ("k-cycle", 5, 2),
        ("k-clique", 8, 4),
        ("k-subsets", 5, 2),
    ],
)
def test_loaded_runs_follow_the_precomputed_schedule(make_config, algorithm, n, k):
    config = make_config(
        n=n,
        energy_cap=k,
        algorithm=algorithm,
        adversary="saturating",
        adversary_params={"pattern": "round-robin"},
        horizon=2000,
    )
    simulation = Simulation(config)
    schedule = extract_oblivious_schedule(simulation.algorithm)
    busy = 0
    for _ in range(config.horizon):
        outcome = simulation.step()
        assert outcome.on_stations == schedule.on_set(outcome.round), f"round {outcome.round}"
        busy += outcome.heard
    assert busy > 0
