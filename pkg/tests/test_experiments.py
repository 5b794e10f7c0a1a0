import numpy as np
import pytest

from kuramoto_pinning import experiments as ex
from kuramoto_pinning.graph import build_graph, is_connected
from kuramoto_pinning.rng import stream

STAR = ex.NetworkSpec("star", {"n": 10})


def _plan(**kw):
    base = dict(network=STAR, strategy="degree", m_axis=(0, 2, 4), c_axis=(0.0, 0.5, 2.0),
                replicas=3, seed=5, coupling=5.0, t_end=20.0)
    base.update(kw)
    return ex.ExperimentPlan(**base)


def test_zero_strength_and_zero_controllers_give_one():
    res = ex.run_sweep(_plan())
    assert (res.mean_rhat[0] == 1.0).all()
    assert (res.mean_rhat[:, 0] == 1.0).all()
    assert (res.std_rhat[0] == 0.0).all()
    assert (res.n_valid == 3).all()


def test_sweep_is_deterministic_and_thread_independent():
    a = ex.run_sweep(_plan(), threads=1)
    b = ex.run_sweep(_plan(), threads=3)
    np.testing.assert_array_equal(a.mean_rhat, b.mean_rhat)
    np.testing.assert_array_equal(a.std_rhat, b.std_rhat)


def test_single_cell_grid_matches_run_cell():
    plan = _plan()
    full = ex.run_sweep(plan)
    mean, std, notes = ex.run_cell(plan, 4, 2.0)
    assert mean == full.mean_rhat[2, 2] and std == full.std_rhat[2, 2]
    assert notes == []


def test_control_desynchronises_star():
    res = ex.run_sweep(_plan(m_axis=(5,), c_axis=(2.0,), t_end=60.0))
    assert res.mean_rhat[0, 0] < 0.5


def test_strategies_share_draws():
    plan = _plan(m_axis=(0,), c_axis=(1.0,))
    out = ex.run_sweeps(plan, ["random", "degree"])
    np.testing.assert_array_equal(out[ex.Strategy.RANDOM].mean_rhat, out[ex.Strategy.DEGREE].mean_rhat)


def test_degenerate_baseline_becomes_cell_error():
    plan = _plan(baseline_eps=2.0)
    res = ex.run_sweep(plan)
    assert (res.n_valid == 0).all() and np.isnan(res.mean_rhat).all()
    assert "unusable" in res.flags[(0, 0)]
    with pytest.raises(ex.CellError):
        ex.run_cell(plan, 2, 1.0)


def test_resonance_is_flagged_not_fatal():
    # a frequency spread of zero makes every controller pair resonant
    plan = _plan(omega_std=0.0, freq_gap_min=0.0, m_axis=(2,), c_axis=(1.0,))
    res = ex.run_sweep(plan)
    assert res.n_valid[0, 0] == 0
    assert any("replica" in n for n in res.flags[(0, 0)])


def test_core_split_axis():
    spec = ex.NetworkSpec("core_periphery", {"n_core": 10, "n_total": 40, "p": 0.7})
    plan = _plan(network=spec, m_core=5, c_axis=(0.0, 1.0), replicas=2)
    res = ex.run_core_split_sweep(plan)
    assert res.axis_name == "k" and res.m_axis == [0, 1, 2, 3, 4, 5]
    assert (res.mean_rhat[:, 0] == 1.0).all()
    with pytest.raises(ex.ExperimentError):
        ex.run_core_split_sweep(_plan(m_core=3))


def test_plan_dict_round_trip():
    plan = _plan(k_axis=(0, 5), m_core=5)
    assert ex.ExperimentPlan.from_dict(plan.to_dict()) == plan
    with pytest.raises(ValueError):
        ex.ExperimentPlan.from_dict({**plan.to_dict(), "bogus": 1})


def test_expand_axis():
    assert ex.expand_axis({"start": 1, "stop": 29, "step": 2}) == tuple(range(1, 30, 2))
    assert ex.expand_axis({"start": 0.05, "stop": 3, "num": 30})[-1] == 3.0
    assert ex.expand_axis([1, 2]) == (1, 2)


def test_network_sources():
    for spec in (ex.NetworkSpec("scale_free", {"gamma": -2.5}),
                 ex.NetworkSpec("watts_strogatz", {"n": 30, "k_mean": 4}),
                 ex.NetworkSpec("ring", {"n": 20, "k": 4, "switches": "L/2"})):
        g, core = ex.build_network(spec, stream(1))
        assert is_connected(g) or spec.kind == "ring"
        assert core is None
    with pytest.raises(ValueError):
        ex.NetworkSpec("erdos")


def test_resolve_swaps():
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    assert ex.resolve_swaps("L/2", g) == 2
    assert ex.resolve_swaps("L", g) == 5
    assert ex.resolve_swaps(3, g) == 3


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv(ex.THREADS_ENV, "3")
    assert ex.resolve_threads(None) == 3
    assert ex.resolve_threads(0) >= 1


def test_gamma_and_p_scans_are_small_and_deterministic():
    template = _plan(network=ex.NetworkSpec("scale_free", {}), m_axis=(2, 6), c_axis=(1.0,), replicas=1,
                     t_end=10.0)
    a = ex.run_gamma_scan([-2.5], template, networks=2, strategies=("random", "degree"))
    b = ex.run_gamma_scan([-2.5], template, networks=2, strategies=("random", "degree"))
    assert a.rows == b.rows and len(a.rows) == 4
    assert {lab for _, lab, _, _ in a.rows} == {"random", "degree"}
    cp = _plan(network=ex.NetworkSpec("core_periphery", {"n_total": 30}), m_core=3, c_axis=(0.0, 1.0),
               replicas=1, t_end=10.0)
    scan = ex.run_p_scan([0.6], cp, networks=1, strategies=("degree",))
    assert [lab for _, lab, _, _ in scan.rows] == ["degree:k=0", "degree:k=1", "degree:k=3"]
    with pytest.raises(ValueError):
        ex.run_gamma_scan([-5.0], template, networks=1)


def test_plan_coerces_yaml_exponent_strings():
    d = {**_plan().to_dict(), "baseline_eps": "1e-6", "replicas": "4"}
    plan = ex.ExperimentPlan.from_dict(d)
    assert plan.baseline_eps == 1e-6 and plan.replicas == 4


@pytest.mark.xfail(strict=True, reason="index tie-break on a ring picks a contiguous block, which "
                                        "controls far worse than a random spread")
def test_ring_random_matches_degree_within_3_sigma():
    plan = _plan(network=ex.NetworkSpec("ring", {"n": 30, "k": 4}, fixed=True), m_axis=(6,), c_axis=(1.5,),
                 replicas=1, draws_per_network=24, t_end=40.0)
    out = ex.run_sweeps(plan, ["random", "degree"])
    r, d = out[ex.Strategy.RANDOM], out[ex.Strategy.DEGREE]
    se = np.sqrt((r.std_rhat[0, 0] ** 2 + d.std_rhat[0, 0] ** 2) / 24)
    assert abs(r.mean_rhat[0, 0] - d.mean_rhat[0, 0]) <= 3 * se


def test_ring_degree_selection_is_a_contiguous_block():
    from kuramoto_pinning.generators import gen_regular_ring
    from kuramoto_pinning.selection import select_controllers

    assert select_controllers(gen_regular_ring(30, 4), "degree", 6) == tuple(range(6))


def test_file_source_defaults_to_fifty_replicas(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("a b\nb c\n")
    plan = ex.ExperimentPlan.from_dict({"network": {"kind": "file", "params": {"path": str(p)}}})
    assert plan.replicas == 50
    assert ex.ExperimentPlan.from_dict({"network": {"kind": "star"}}).replicas == 100
