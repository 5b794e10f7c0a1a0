"""Scalar diagnostics over trajectories, sweeps and controller placements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .dynamics import Trajectory
from .graph import UNREACHABLE, Graph, GraphError, all_pairs_distances

DEFAULT_TRANSIENT = 0.5
DEFAULT_THRESHOLD = 0.15
BASELINE_EPS = 1e-6


class DegenerateBaselineError(ValueError):
    """The uncontrolled run never synchronised, so R-hat is undefined."""


@dataclass
class SweepResult:
    """Ensemble-mean synchronisation map over (controller count, strength).

    ``axis_name`` is ``"m"`` for ordinary sweeps and ``"k"`` (controllers in
    the core) for core-split sweeps. ``flags`` maps ``(i, j)`` cell indices to
    diagnostic strings.
    """

    m_axis: list[int]
    c_axis: list[float]
    mean_rhat: np.ndarray
    std_rhat: np.ndarray
    n_valid: np.ndarray
    replicas: int
    threshold: float = DEFAULT_THRESHOLD
    axis_name: str = "m"
    flags: dict[tuple[int, int], list[str]] = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.m_axis), len(self.c_axis))
        self.mean_rhat = np.asarray(self.mean_rhat, dtype=float).reshape(shape)
        self.std_rhat = np.asarray(self.std_rhat, dtype=float).reshape(shape)
        self.n_valid = np.asarray(self.n_valid, dtype=np.int64).reshape(shape)


def asymptotic_order(traj: Trajectory, transient_fraction: float = DEFAULT_TRANSIENT) -> float:
    """Mean of ``R(t)`` over ``t >= transient_fraction * t_end``."""
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must lie in [0, 1)")
    t = np.asarray(traj.times)
    if t.size == 0:
        raise ValueError("empty trajectory")
    cut = transient_fraction * t[-1]
    window = np.asarray(traj.R_series)[t >= cut - 1e-12 * max(1.0, abs(cut))]
    if window.size == 0:
        raise ValueError("no samples after the transient")
    return float(window.mean())


def normalized_order(controlled: float, uncontrolled: float, eps: float = BASELINE_EPS) -> float:
    """Controlled over uncontrolled asymptotic order parameter."""
    if uncontrolled <= eps:
        raise DegenerateBaselineError(f"uncontrolled R_as {uncontrolled:.3g} <= {eps:g}")
    return controlled / uncontrolled


def delta_fraction(sweep: SweepResult, threshold: float | None = None) -> float:
    """Fraction of cells whose mean R-hat is at most ``threshold``; NaN cells count as failures."""
    thr = sweep.threshold if threshold is None else threshold
    vals = sweep.mean_rhat
    if vals.size == 0:
        raise ValueError("empty sweep")
    return float(np.count_nonzero(np.nan_to_num(vals, nan=np.inf) <= thr) / vals.size)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("pearson needs two equal-length vectors of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise ValueError("zero variance")
    return float(np.clip(dx @ dy / np.sqrt(sxx * syy), -1.0, 1.0))


class ControllerDistance(NamedTuple):
    normalized: float
    raw: float
    network_mean: float


def _connected_distances(g: Graph) -> np.ndarray:
    dist = all_pairs_distances(g)
    if g.n_nodes < 2 or np.any(dist == UNREACHABLE):
        raise GraphError("graph must be connected with at least two nodes")
    return dist


def controller_distance_stats(g: Graph, controllers: Sequence[int]) -> ControllerDistance:
    """Mean hop distance from each unpinned node to its nearest controller.

    ``normalized`` divides it by the all-pairs mean distance of the graph.
    """
    ctrl = sorted(set(int(c) for c in controllers))
    if not ctrl or len(ctrl) >= g.n_nodes:
        raise ValueError("controllers must be non-empty and leave some node unpinned")
    dist = _connected_distances(g)
    free = np.setdiff1d(np.arange(g.n_nodes), ctrl)
    raw = float(dist[np.ix_(free, ctrl)].min(axis=1).mean())
    iu = np.triu_indices(g.n_nodes, 1)
    net = float(dist[iu].mean())
    return ControllerDistance(raw / net, raw, net)


def clustering_coefficients(g: Graph) -> np.ndarray:
    a = g.adjacency.astype(float)
    tri = np.einsum("ij,jk,ki->i", a, a, a) / 2.0
    d = g.degrees.astype(float)
    possible = d * (d - 1) / 2.0
    return np.divide(tri, possible, out=np.zeros_like(tri), where=possible > 0)


def small_world_stats(g: Graph) -> tuple[float, float]:
    """``(mean local clustering, mean shortest-path length)`` of a connected graph."""
    dist = _connected_distances(g)
    iu = np.triu_indices(g.n_nodes, 1)
    return float(clustering_coefficients(g).mean()), float(dist[iu].mean())
