"""Immutable simple-graph representation and structural primitives."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Distance value returned by :func:`bfs_distances` for unreachable nodes.
UNREACHABLE = -1


class GraphError(ValueError):
    """Raised for invalid graph construction or unsupported graph inputs."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected unweighted graph on nodes ``0..n_nodes-1``.

    Instances are immutable; use :func:`build_graph` to construct one.
    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    sorted lexicographically.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    _adjacency: np.ndarray = field(repr=False)
    _indptr: np.ndarray = field(repr=False)
    _indices: np.ndarray = field(repr=False)

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only boolean adjacency matrix."""
        return self._adjacency

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` neighbor arrays, neighbors sorted ascending."""
        return self._indptr, self._indices

    def neighbors(self, node: int) -> np.ndarray:
        return self._indices[self._indptr[node]:self._indptr[node + 1]]

    def edge_list(self) -> list[tuple[int, int]]:
        return list(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n_nodes, self.edges))


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a simple graph, dropping self-loops and collapsing duplicates.

    Raises
    ------
    GraphError
        If any endpoint lies outside ``[0, n)``.
    """
    n = int(n)
    if n < 0:
        raise GraphError(f"node count must be non-negative, got {n}")
    canon = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            continue
        canon.add((u, v) if u < v else (v, u))
    edge_tuple = tuple(sorted(canon))

    adj = np.zeros((n, n), dtype=bool)
    if edge_tuple:
        arr = np.asarray(edge_tuple, dtype=np.int64)
        adj[arr[:, 0], arr[:, 1]] = True
        adj[arr[:, 1], arr[:, 0]] = True
    adj.setflags(write=False)

    indptr = np.zeros(n + 1, dtype=np.int32)
    indptr[1:] = np.cumsum(adj.sum(axis=1))
    indices = np.nonzero(adj)[1].astype(np.int32)
    indptr.setflags(write=False)
    indices.setflags(write=False)
    return Graph(n, edge_tuple, adj, indptr, indices)


def from_adjacency(adj: np.ndarray) -> Graph:
    """Graph from a square 0/1 matrix; any nonzero entry in either direction is an edge."""
    a = np.asarray(adj) != 0
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphError("adjacency must be a square matrix")
    a = a | a.T
    u, v = np.nonzero(np.triu(a, 1))
    return build_graph(a.shape[0], zip(u.tolist(), v.tolist()))


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by their smallest node."""
    seen = np.zeros(g.n_nodes, dtype=bool)
    comps = []
    for s in range(g.n_nodes):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(int(w))
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n_nodes > 0 and len(connected_components(g)) == 1


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` relabelled densely in the given order.

    Returns the subgraph and ``remap`` with ``remap[new] = old``.
    """
    remap = np.asarray(nodes, dtype=np.int64)
    pos = {int(old): new for new, old in enumerate(remap)}
    sub_edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    return build_graph(len(remap), sub_edges), remap


def largest_connected_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Largest component, ties going to the one holding the smallest node index.

    Returns the component (nodes kept in ascending original order) and the
    ``remap`` array mapping new indices to original ones.
    """
    if g.n_nodes == 0:
        raise GraphError("empty graph has no connected component")
    comps = connected_components(g)
    # components are already ordered by smallest member, so max() keeps the first tie
    best = max(comps, key=len)
    return induced_subgraph(g, best)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get :data:`UNREACHABLE`."""
    if not 0 <= source < g.n_nodes:
        raise GraphError(f"source {source} out of range")
    dist = np.full(g.n_nodes, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.neighbors(u):
            if dist[w] == UNREACHABLE:
                dist[w] = du
                queue.append(w)
    return dist


def all_pairs_distances(g: Graph) -> np.ndarray:
    """``n x n`` hop-distance matrix with :data:`UNREACHABLE` for disconnected pairs."""
    return np.vstack([bfs_distances(g, s) for s in range(g.n_nodes)]) if g.n_nodes else np.zeros((0, 0), dtype=np.int64)


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``diag(d) - A`` as a float matrix."""
    a = g.adjacency.astype(float)
    return np.diag(a.sum(axis=1)) - a


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with node ``i`` renamed to ``perm[i]``."""
    p = np.asarray(perm)
    return build_graph(g.n_nodes, [(int(p[u]), int(p[v])) for u, v in g.edges])


def node_set(indices: Iterable[int], n_nodes: int) -> tuple[int, ...]:
    """Validate an ordered collection of distinct node indices."""
    out = tuple(int(i) for i in indices)
    if len(set(out)) != len(out):
        raise GraphError(f"duplicate node indices in {out}")
    for i in out:
        if not 0 <= i < n_nodes:
            raise GraphError(f"node index {i} out of range for n={n_nodes}")
    return out
