import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuramoto_pinning import io_formats as iof
from kuramoto_pinning.graph import build_graph
from kuramoto_pinning.metrics import SweepResult


def _write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_symmetrized_duplicate(tmp_path):
    g = iof.parse_edge_list(_write(tmp_path, "a b\nb a\n"))
    assert g.n_nodes == 2 and g.n_edges == 1


def test_weights_and_comments(tmp_path):
    g = iof.parse_edge_list(_write(tmp_path, "a b 0.3\n# note\nb c 2\n"))
    assert g.degrees.tolist() == [1, 2, 1]


def test_label_order_and_self_loops(tmp_path):
    g = iof.parse_edge_list(_write(tmp_path, "z y\ny y\nx z\n"))
    # z -> 0, y -> 1, x -> 2
    assert g.edges == ((0, 1), (0, 2))


@pytest.mark.parametrize("text", ["a\n", "a b c d\n", "a b notanumber\n"])
def test_malformed_line(tmp_path, text):
    with pytest.raises(iof.FormatError, match=r"g\.txt:1: "):
        iof.parse_edge_list(_write(tmp_path, text))


def test_empty_file(tmp_path):
    with pytest.raises(iof.FormatError):
        iof.parse_edge_list(_write(tmp_path, "# nothing\n\n"))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), min_size=1, max_size=30))
def test_edge_list_round_trip(tmp_path_factory, n, pairs):
    pairs = [(u % n, v % n) for u, v in pairs if u % n != v % n]
    if not pairs:
        return
    used = sorted({x for e in pairs for x in e})
    g = build_graph(len(used), [(used.index(u), used.index(v)) for u, v in pairs])
    path = tmp_path_factory.mktemp("rt") / "g.txt"
    iof.write_edge_list(g, path)
    h = iof.parse_edge_list(path)
    # nodes are renumbered by first appearance; undo that and compare edge sets
    order = []
    for line in path.read_text().splitlines():
        if not line.startswith("#"):
            order += [int(t) for t in line.split() if int(t) not in order]
    back = {frozenset((order[u], order[v])) for u, v in h.edges}
    assert back == {frozenset(e) for e in g.edges}


def _sweep():
    mean = np.array([[0.123456789012345, 1.0], [0.0, np.nan]])
    return SweepResult([1, 3], [0.05, 1.0], mean, np.full((2, 2), 0.01), [[5, 5], [4, 0]], 5,
                       flags={(1, 1): ["unusable"]})


def test_results_round_trip(tmp_path):
    p = tmp_path / "r.csv"
    iof.write_results(_sweep(), p, {"seed": 7})
    lines = p.read_text().splitlines()
    assert lines[0] == "m,c,mean_rhat,std_rhat,n_valid_replicas"
    assert len(lines) == 5
    res, meta = iof.read_results(p)
    assert meta["seed"] == 7 and meta["code_version"]
    assert res.m_axis == [1, 3] and res.c_axis == [0.05, 1.0]
    assert res.mean_rhat[0, 0] == float(iof.fmt(0.123456789012345))
    assert np.isnan(res.mean_rhat[1, 1])
    assert res.flags == {(1, 1): ["unusable"]}
    # writing what was read reproduces the bytes
    q = tmp_path / "q.csv"
    iof.write_results(res, q, {"seed": 7})
    assert q.read_bytes() == p.read_bytes()


def test_schema_mismatch(tmp_path):
    p = tmp_path / "r.csv"
    iof.write_results(_sweep(), p)
    side = iof.sidecar_path(p)
    side.write_text(side.read_text().replace('"schema_version": 1', '"schema_version": 99'))
    with pytest.raises(iof.FormatError):
        iof.read_results(p)


def test_fmt_is_ten_significant_digits():
    assert iof.fmt(1 / 3) == "0.3333333333"
    assert iof.fmt(2.0) == "2"


def test_tables(tmp_path):
    p = tmp_path / "t.csv"
    iof.write_trajectory([0.0, 0.5], [1.0, 0.25], p)
    assert p.read_text() == "t,R\n0,1\n0.5,0.25\n"
    iof.write_scores([3.0, 0.5], p, {"kind": "centrality"})
    assert p.read_text() == "node,score\n0,3\n1,0.5\n"
    assert iof.read_sidecar(p)["kind"] == "centrality"


def test_load_config(tmp_path):
    p = _write(tmp_path, "network:\n  kind: star\nreplicas: 3\n", "c.yaml")
    assert iof.load_config(p) == {"network": {"kind": "star"}, "replicas": 3}
    with pytest.raises(iof.FormatError):
        iof.load_config(_write(tmp_path, "- 1\n", "bad.yaml"))
