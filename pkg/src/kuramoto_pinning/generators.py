"""Synthetic network families and degree-preserving rewiring.

All generators are pure functions of their parameters and the supplied
``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, GraphError, build_graph, largest_connected_component


class GenerationError(RuntimeError):
    """A randomized generator failed to produce an acceptable graph."""


def power_law_degrees(n: int, gamma: float, rng: np.random.Generator,
                      k_min: int = 2, k_max: int | None = None) -> np.ndarray:
    """Draw ``n`` degrees from ``P(k) ~ k**gamma`` on ``[k_min, k_max]`` with an even sum."""
    if k_max is None:
        k_max = n - 1
    if not 1 <= k_min <= k_max:
        raise ValueError(f"invalid degree range [{k_min}, {k_max}]")
    support = np.arange(k_min, k_max + 1)
    pmf = support.astype(float) ** gamma
    pmf /= pmf.sum()
    degrees = rng.choice(support, size=n, p=pmf)
    if degrees.sum() % 2:
        # redraw one entry until the stub count is even
        i = rng.integers(n)
        while True:
            degrees[i] = rng.choice(support, p=pmf)
            if degrees.sum() % 2 == 0:
                break
    return degrees


def configuration_model(degrees: np.ndarray, rng: np.random.Generator) -> Graph:
    """Uniform stub matching projected to a simple graph (loops and multi-edges dropped)."""
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.sum() % 2:
        raise ValueError("degree sum must be even")
    stubs = np.repeat(np.arange(len(degrees)), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    return build_graph(len(degrees), pairs.tolist())


def default_k_min(gamma: float) -> int:
    """Smallest degree used for exponent ``gamma``.

    With ``k_min = 1`` the configuration model has no giant component once the
    exponent is much steeper than -3, so those exponents use ``k_min = 2``.
    """
    return 1 if gamma >= -3.0 else 2


def gen_scale_free(gamma: float = -3.0, lcc_window: tuple[int, int] = (85, 115),
                   rng: np.random.Generator | None = None, n_nodes: int | None = None,
                   k_min: int | None = None, k_max: int | None = None,
                   max_attempts: int = 1000) -> Graph:
    """Largest component of a power-law configuration-model graph.

    Graphs are regenerated until the component size lies in ``lcc_window``.

    Parameters
    ----------
    gamma : float
        Degree exponent, in ``[-4, -2]``.
    lcc_window : (int, int)
        Inclusive acceptance window on the component size.
    n_nodes : int, optional
        Size of the configuration-model graph before component extraction.
        By default it adapts between attempts so the expected component size
        sits at the window midpoint.
    k_min, k_max : int, optional
        Degree support; defaults to :func:`default_k_min` and ``n_nodes - 1``.
    """
    if not -4.0 <= gamma <= -2.0:
        raise ValueError(f"gamma must lie in [-4, -2], got {gamma}")
    lo, hi = lcc_window
    if lo > hi or lo < 1:
        raise ValueError(f"invalid acceptance window {lcc_window}")
    rng = rng if rng is not None else np.random.default_rng()
    if k_min is None:
        k_min = default_k_min(gamma)
    adaptive = n_nodes is None
    target = 0.5 * (lo + hi)
    n = int(n_nodes) if n_nodes is not None else hi
    seen_nodes = seen_lcc = 0
    for _ in range(max_attempts):
        degrees = power_law_degrees(n, gamma, rng, k_min=k_min, k_max=k_max)
        g = configuration_model(degrees, rng)
        lcc, _ = largest_connected_component(g)
        if lo <= lcc.n_nodes <= hi:
            return lcc
        if adaptive:
            seen_nodes += n
            seen_lcc += lcc.n_nodes
            n = int(min(max(round(target * seen_nodes / seen_lcc), hi), 20 * hi))
    raise GenerationError(f"no component of size in [{lo}, {hi}] after {max_attempts} attempts")


def gen_core_periphery(n_core: int = 10, n_total: int = 100, p: float = 0.7,
                       rng: np.random.Generator | None = None) -> tuple[Graph, tuple[int, ...]]:
    """Clique core plus a tree-like periphery grown one node at a time.

    Node ``j >= n_core`` links to a uniformly chosen core node with probability
    ``p``, otherwise to a uniformly chosen earlier periphery node. The first
    periphery node always attaches to the core.

    Returns
    -------
    graph, core
        The graph and the core node indices ``0..n_core-1``.
    """
    if not 1 <= n_core < n_total:
        raise ValueError(f"need 1 <= n_core < n_total, got {n_core}, {n_total}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be a probability, got {p}")
    rng = rng if rng is not None else np.random.default_rng()
    edges = [(i, j) for i in range(n_core) for j in range(i + 1, n_core)]
    for j in range(n_core, n_total):
        to_core = rng.random() < p
        if to_core or j == n_core:
            target = int(rng.integers(n_core))
        else:
            target = int(rng.integers(n_core, j))
        edges.append((target, j))
    return build_graph(n_total, edges), tuple(range(n_core))


def gen_regular_ring(n: int, k: int) -> Graph:
    """Circulant lattice where each node links to ``k/2`` neighbours on each side."""
    if k % 2 or not 0 <= k < n:
        raise ValueError(f"k must be even and < n, got k={k}, n={n}")
    return build_graph(n, [(i, (i + j) % n) for i in range(n) for j in range(1, k // 2 + 1)])


def gen_watts_strogatz(n: int = 100, k_mean: int = 10, p_ws: float = 0.1,
                       rng: np.random.Generator | None = None) -> Graph:
    """Watts-Strogatz small world: ring lattice with each lattice edge rewired w.p. ``p_ws``.

    The far endpoint of a rewired edge moves to a uniform node that is neither
    the near endpoint nor already one of its neighbours, so the edge count is
    preserved.
    """
    if k_mean % 2 or not 0 <= k_mean < n:
        raise ValueError(f"k_mean must be even and < n, got {k_mean}")
    rng = rng if rng is not None else np.random.default_rng()
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(1, k_mean // 2 + 1):
            v = (i + j) % n
            adj[i].add(v)
            adj[v].add(i)
    for j in range(1, k_mean // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() >= p_ws or v not in adj[u]:
                continue
            if len(adj[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(n))
                if w != u and w not in adj[u]:
                    break
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return build_graph(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


def gen_star(n: int) -> Graph:
    """Star with hub 0 and leaves ``1..n-1``."""
    if n < 2:
        raise ValueError(f"star needs n >= 2, got {n}")
    return build_graph(n, [(0, i) for i in range(1, n)])


def criss_cross_reshuffle(g: Graph, n_switches: int, rng: np.random.Generator | None = None,
                          max_attempts: int | None = None) -> Graph:
    """Apply ``n_switches`` successful degree-preserving double-edge swaps.

    Each swap draws two distinct edges ``(a, b)``, ``(c, d)`` on four distinct
    nodes and exchanges one endpoint, giving ``(a, d), (c, b)`` or
    ``(a, c), (b, d)``. Swaps that would duplicate an existing edge are
    rejected and redrawn; only successful swaps count.
    """
    if n_switches < 0:
        raise ValueError("n_switches must be non-negative")
    if n_switches == 0:
        return g
    if g.n_edges < 2:
        raise GraphError("reshuffling needs at least two edges")
    rng = rng if rng is not None else np.random.default_rng()
    if max_attempts is None:
        max_attempts = 100 * n_switches + 1000
    edges = [list(e) for e in g.edges]
    present = set(g.edges)
    done = 0
    attempts = 0
    while done < n_switches:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationError(f"only {done}/{n_switches} swaps after {max_attempts} attempts")
        i, j = rng.choice(len(edges), size=2, replace=False)
        a, b = edges[i]
        c, d = edges[j]
        if len({a, b, c, d}) < 4:
            continue
        if rng.random() < 0.5:
            e1, e2 = (a, d), (c, b)
        else:
            e1, e2 = (a, c), (b, d)
        e1 = (min(e1), max(e1))
        e2 = (min(e2), max(e2))
        if e1 in present or e2 in present:
            continue
        present.discard((min(a, b), max(a, b)))
        present.discard((min(c, d), max(c, d)))
        present.add(e1)
        present.add(e2)
        edges[i] = list(e1)
        edges[j] = list(e2)
        done += 1
    return build_graph(g.n_nodes, edges)
