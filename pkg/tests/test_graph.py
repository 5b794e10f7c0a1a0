import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuramoto_pinning.graph import (
    UNREACHABLE,
    GraphError,
    bfs_distances,
    build_graph,
    largest_connected_component,
    laplacian,
    node_set,
)


@st.composite
def edge_lists(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return n, pairs


def test_path_p3():
    g = build_graph(3, [(0, 1), (1, 2)])
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.n_edges == 2


def test_dedup_and_self_loop_drop():
    g = build_graph(2, [(0, 1), (1, 0), (0, 0)])
    assert g.edges == ((0, 1),)
    assert g.degrees.tolist() == [1, 1]


def test_complete_k4():
    g = build_graph(4, [(i, j) for i in range(4) for j in range(4) if i != j])
    assert g.degrees.tolist() == [3, 3, 3, 3]


def test_index_out_of_range():
    with pytest.raises(GraphError):
        build_graph(3, [(0, 3)])


def test_adjacency_is_read_only():
    g = build_graph(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.adjacency[0, 2] = True


def test_lcc_tie_goes_to_smallest_index():
    g = build_graph(6, [(3, 4), (4, 5), (3, 5), (0, 1), (1, 2), (0, 2)])
    lcc, remap = largest_connected_component(g)
    assert lcc.n_nodes == 3
    assert remap.tolist() == [0, 1, 2]


def test_lcc_identity_on_connected():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    lcc, remap = largest_connected_component(g)
    assert lcc == g
    assert remap.tolist() == [0, 1, 2, 3]


def test_lcc_drops_isolated():
    g = build_graph(4, [(1, 2), (2, 3)])
    lcc, remap = largest_connected_component(g)
    assert lcc.degrees.tolist() == [1, 2, 1]
    assert remap.tolist() == [1, 2, 3]


def test_lcc_empty_graph():
    with pytest.raises(GraphError):
        largest_connected_component(build_graph(0, []))


def test_bfs_star_and_path():
    star = build_graph(10, [(0, i) for i in range(1, 10)])
    assert bfs_distances(star, 0).tolist() == [0] + [1] * 9
    p3 = build_graph(3, [(0, 1), (1, 2)])
    assert bfs_distances(p3, 0).tolist() == [0, 1, 2]


def test_bfs_unreachable_sentinel():
    d = bfs_distances(build_graph(2, []), 0)
    assert d[1] == UNREACHABLE
    assert UNREACHABLE < 0


@pytest.mark.parametrize(
    "n, edges, expected",
    [
        (3, [(0, 1), (1, 2)], [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]),
        (3, [(0, 1), (1, 2), (0, 2)], [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]),
        (2, [], [[0, 0], [0, 0]]),
    ],
)
def test_laplacian_examples(n, edges, expected):
    np.testing.assert_array_equal(laplacian(build_graph(n, edges)), expected)


def test_node_set_validation():
    assert node_set([2, 0], 3) == (2, 0)
    with pytest.raises(GraphError):
        node_set([0, 0], 3)
    with pytest.raises(GraphError):
        node_set([3], 3)


@given(edge_lists())
def test_structural_invariants(data):
    n, pairs = data
    g = build_graph(n, pairs)
    a = g.adjacency
    assert not a.diagonal().any()
    assert (a == a.T).all()
    assert g.degrees.tolist() == a.sum(axis=1).tolist()
    assert g.degrees.sum() == 2 * g.n_edges
    assert build_graph(n, g.edge_list()) == g


@given(edge_lists())
def test_laplacian_kernel(data):
    g = build_graph(*data)
    lap = laplacian(g)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0)
    eig = np.linalg.eigvalsh(lap)
    assert abs(eig[0]) < 1e-9
    assert eig.min() > -1e-9


@settings(max_examples=50)
@given(edge_lists(max_n=10), st.data())
def test_bfs_triangle_inequality(data, draw):
    g = build_graph(*data)
    n = g.n_nodes
    dist = np.vstack([bfs_distances(g, s) for s in range(n)])
    for _ in range(10):
        i, j, k = (draw.draw(st.integers(0, n - 1)) for _ in range(3))
        if UNREACHABLE in (dist[i, j], dist[j, k]):
            continue
        assert dist[i, k] != UNREACHABLE
        assert dist[i, k] <= dist[i, j] + dist[j, k]
