"""Node centralities used to place controllers.

Scores are plain ``float64`` arrays indexed by node; :class:`CentralityScores`
tags them with their kind.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import linalg

from .graph import Graph, is_connected, laplacian


class CentralityError(ValueError):
    """Centrality undefined for the given graph or arguments."""


class NumericalError(ArithmeticError):
    """A linear solve did not reach the required residual."""


class CentralityKind(str, Enum):
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    FUNCTIONABILITY = "functionability"


@dataclass(frozen=True)
class CentralityScores:
    kind: CentralityKind
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise CentralityError(f"{self.kind.value} scores must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


DEFAULT_ALPHA = 0.5
SOLVE_RTOL = 1e-10
ROUNDOFF_FLOOR = 1e-12


def degree_scores(g: Graph) -> CentralityScores:
    return CentralityScores(CentralityKind.DEGREE, g.degrees.astype(float))


def betweenness_scores(g: Graph) -> CentralityScores:
    """Exact shortest-path betweenness (Brandes), unordered pairs, no normalisation."""
    n = g.n_nodes
    indptr, indices = g.csr
    cb = np.zeros(n)
    for s in range(n):
        order = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v]
            for w in indices[indptr[v]:indptr[v + 1]]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    # every unordered pair was visited from both ends
    return CentralityScores(CentralityKind.BETWEENNESS, cb / 2.0)


def functionability_scores(g: Graph, alpha: float = DEFAULT_ALPHA) -> CentralityScores:
    """Functionability proxy of every node.

    For node ``k`` this is ``(alpha d_k / 2N^2)^2`` times the sum over ``l`` of
    the grand sum of ``inv(L(k,l) L(k,l)^T)``, where ``L(k,l)`` is the
    Laplacian without row ``k`` and column ``l``.

    ``L(k,l) L(k,l)^T`` equals ``A_k - u u^T`` with ``A_k`` the matrix ``L @ L``
    stripped of row and column ``k`` and ``u`` column ``l`` of ``L`` without
    entry ``k``. One Cholesky factorisation of ``A_k`` per node then serves all
    ``l`` via the Sherman-Morrison formula.

    Raises
    ------
    CentralityError
        If the graph is disconnected (every minor is singular).
    NumericalError
        If a reconstructed solve misses the residual tolerance.
    """
    if not 0.0 < alpha <= np.pi / 2:
        raise CentralityError(f"alpha must lie in (0, pi/2], got {alpha}")
    n = g.n_nodes
    if n < 2 or not is_connected(g):
        raise CentralityError("functionability needs a connected graph with at least two nodes")
    lap = laplacian(g)
    lap2 = lap @ lap
    ones = np.ones(n - 1)
    grand = np.empty(n)
    for k in range(n):
        keep = np.r_[0:k, k + 1:n]
        a = lap2[np.ix_(keep, keep)]
        u = lap[keep, :]
        try:
            factor = linalg.cho_factor(a, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise NumericalError(f"grounded squared Laplacian at node {k} not positive definite") from exc
        y1 = linalg.cho_solve(factor, ones, check_finite=False)
        y = linalg.cho_solve(factor, u, check_finite=False)
        denom = 1.0 - np.einsum("il,il->l", u, y)
        coef = (u.T @ y1) / denom
        x = y1[:, None] + y * coef[None, :]
        # residual of (A - u u^T) x = 1 for every l at once
        resid = a @ x - u * np.einsum("il,il->l", u, x)[None, :] - 1.0
        scale = np.abs(a).sum(axis=1).max() * np.abs(x).max(axis=0) + 1.0
        if np.any(np.abs(resid).max(axis=0) > SOLVE_RTOL * scale):
            raise NumericalError(f"minor solves at node {k} exceed residual tolerance")
        grand[k] = x.sum()
    grand[(grand < 0) & (grand > -ROUNDOFF_FLOOR)] = 0.0
    values = (alpha * g.degrees / (2.0 * n * n)) ** 2 * grand
    return CentralityScores(CentralityKind.FUNCTIONABILITY, values)


def reduced_laplacian_min_eig(g: Graph, controllers: Sequence[int]) -> float:
    """Smallest eigenvalue of the Laplacian with controller rows and columns removed."""
    ctrl = sorted(set(int(c) for c in controllers))
    if not ctrl:
        raise CentralityError("controller set must be non-empty")
    if ctrl[0] < 0 or ctrl[-1] >= g.n_nodes:
        raise CentralityError("controller index out of range")
    if len(ctrl) == g.n_nodes:
        raise CentralityError("at least one node must remain uncontrolled")
    keep = np.setdiff1d(np.arange(g.n_nodes), ctrl)
    lap = laplacian(g)
    return float(np.linalg.eigvalsh(lap[np.ix_(keep, keep)])[0])


def scores(g: Graph, kind: CentralityKind | str, alpha: float = DEFAULT_ALPHA) -> CentralityScores:
    kind = CentralityKind(kind)
    if kind is CentralityKind.DEGREE:
        return degree_scores(g)
    if kind is CentralityKind.BETWEENNESS:
        return betweenness_scores(g)
    return functionability_scores(g, alpha)
