import numpy as np
import pytest
from hypothesis import given, strategies as st

from kuramoto_pinning import metrics as met
from kuramoto_pinning.dynamics import Trajectory
from kuramoto_pinning.generators import gen_regular_ring, gen_star
from kuramoto_pinning.graph import build_graph


def _traj(values, dt=0.5):
    values = np.asarray(values, dtype=float)
    return Trajectory(np.arange(len(values)) * dt, values, np.zeros(1))


def test_asymptotic_order_examples():
    assert met.asymptotic_order(_traj([0.4] * 11)) == pytest.approx(0.4)
    # 11 samples on t = 0..5, cut at 2.5 falls between the zeros and the ones
    assert met.asymptotic_order(_traj([0] * 5 + [1] * 6)) == 1.0
    with pytest.raises(ValueError):
        met.asymptotic_order(_traj([1.0]), 1.0)


def test_normalized_order():
    assert met.normalized_order(0.7, 0.7) == 1.0
    assert met.normalized_order(0.0, 0.7) == 0.0
    with pytest.raises(met.DegenerateBaselineError):
        met.normalized_order(0.1, 1e-9)


def _sweep(values):
    values = np.asarray(values, dtype=float)
    m, c = values.shape
    return met.SweepResult(list(range(m)), list(np.linspace(0, 1, c)), values, np.zeros_like(values),
                           np.ones(values.shape, dtype=int), 1)


def test_delta_fraction():
    assert met.delta_fraction(_sweep(np.zeros((3, 4)))) == 1.0
    assert met.delta_fraction(_sweep(np.ones((3, 4)))) == 0.0
    assert met.delta_fraction(_sweep([[0.1, 0.15], [0.16, np.nan]])) == 0.5
    assert met.delta_fraction(_sweep([[0.1, 0.2]]), threshold=0.25) == 1.0


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30))
def test_pearson_self(xs):
    x = np.asarray(xs)
    if np.ptp(x) < 1e-6:
        return
    assert met.pearson(x, x) == pytest.approx(1.0)
    assert met.pearson(x, -x) == pytest.approx(-1.0)


def test_pearson_errors():
    with pytest.raises(ValueError):
        met.pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        met.pearson([1], [1])


def test_controller_distance_examples():
    d = met.controller_distance_stats(gen_star(10), [0])
    assert d.raw == 1.0
    assert d.network_mean == pytest.approx(81 / 45)
    assert d.normalized == pytest.approx(0.5556, abs=1e-4)
    p3 = build_graph(3, [(0, 1), (1, 2)])
    assert met.controller_distance_stats(p3, [1]).raw == 1.0
    assert met.controller_distance_stats(p3, [0, 1]).raw == 1.0


def test_controller_distance_errors():
    with pytest.raises(ValueError):
        met.controller_distance_stats(gen_star(4), [])
    with pytest.raises(Exception):
        met.controller_distance_stats(build_graph(4, [(0, 1), (2, 3)]), [0])


def test_small_world_examples():
    k4 = build_graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert met.small_world_stats(k4) == (1.0, 1.0)
    assert met.small_world_stats(gen_star(8))[0] == 0.0
    assert met.small_world_stats(gen_regular_ring(100, 10))[0] == pytest.approx(2 / 3)


@given(st.lists(st.floats(0, 2), min_size=4, max_size=4), st.floats(0, 1), st.floats(0, 1))
def test_delta_monotone_in_threshold(vals, t1, t2):
    s = _sweep(np.reshape(vals, (2, 2)))
    lo, hi = sorted((t1, t2))
    assert met.delta_fraction(s, lo) <= met.delta_fraction(s, hi)


def test_normalized_order_of_identical_runs():
    t = _traj(np.linspace(0.2, 0.9, 21))
    r = met.asymptotic_order(t)
    assert met.normalized_order(r, r) == 1.0


def test_controller_distance_relabel_invariant():
    from kuramoto_pinning.graph import relabel
    from kuramoto_pinning.rng import stream
    from .oracles import random_connected_graph

    for seed in range(10):
        rng = stream(seed)
        g = random_connected_graph(rng)
        if g.n_nodes < 3:
            continue
        perm = rng.permutation(g.n_nodes)
        ctrl = [0, 1]
        a = met.controller_distance_stats(g, ctrl)
        b = met.controller_distance_stats(relabel(g, perm), perm[ctrl])
        assert a == pytest.approx(b)
