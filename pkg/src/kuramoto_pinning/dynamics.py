"""Kuramoto phase dynamics with pinning control.

The functions :func:`order_parameter`, :func:`tilde_order`,
:func:`control_signal` and :func:`rhs` are direct, readable evaluations of the
model; :func:`integrate` runs the same vector field through the compiled (or
fallback) RK4 kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import backend
from .graph import Graph

TWO_PI = 2.0 * np.pi

# calibrated so the uncontrolled 10-node star settles at mean R_as >= 0.9
DEFAULT_COUPLING = 8.0
DEFAULT_DT = 0.05
DEFAULT_T_END = 200.0
DEFAULT_NEIGHBOR_DECAY = float(np.exp(-2.0))
DEFAULT_FREQ_GAP = 1e-3
OMEGA_MEAN = 1.0
OMEGA_STD = 0.1


class ResonanceError(ValueError):
    """Two natural frequencies entering a denominator are too close."""


class IntegrationError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


@dataclass(frozen=True)
class OscillatorSystem:
    phases: np.ndarray
    omegas: np.ndarray
    coupling: float
    graph: Graph

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        om = np.asarray(self.omegas, dtype=float)
        if ph.shape != (self.graph.n_nodes,) or om.shape != (self.graph.n_nodes,):
            raise ValueError("phases and omegas must have one entry per node")
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "omegas", om)


@dataclass(frozen=True)
class ControlConfig:
    controllers: tuple[int, ...]
    strength: float
    neighbor_decay: float = DEFAULT_NEIGHBOR_DECAY
    freq_gap_min: float = DEFAULT_FREQ_GAP

    def __post_init__(self):
        object.__setattr__(self, "controllers", tuple(int(i) for i in self.controllers))
        if self.strength < 0:
            raise ValueError("control strength must be non-negative")
        if not 0.0 < self.neighbor_decay <= 1.0:
            raise ValueError("neighbor_decay must lie in (0, 1]")
        if len(set(self.controllers)) != len(self.controllers):
            raise ValueError("duplicate controllers")


@dataclass(frozen=True)
class OrderParameter:
    R: float
    psi: float


@dataclass
class Trajectory:
    times: np.ndarray
    R_series: np.ndarray
    final_phases: np.ndarray
    snapshots: np.ndarray | None = field(default=None, repr=False)


def order_parameter(phases: Sequence[float]) -> OrderParameter:
    """Modulus and argument of the mean unit phasor."""
    ph = np.asarray(phases, dtype=float)
    if ph.size == 0:
        raise ValueError("order parameter of an empty phase vector")
    z = np.exp(1j * ph).mean()
    return OrderParameter(min(abs(z), 1.0), float(np.angle(z) % TWO_PI))


def _check_gaps(omegas: np.ndarray, gap_min: float) -> None:
    if len(omegas) < 2:
        return
    srt = np.sort(omegas)
    worst = np.min(np.diff(srt))
    if worst < gap_min or worst == 0.0:
        raise ResonanceError(f"frequency gap {worst:.3g} below minimum {gap_min:.3g}")


def _tilde(phases: np.ndarray, omegas: np.ndarray, idx: np.ndarray, norm: int) -> np.ndarray:
    # complex R~_k e^{i psi~_k}, resonant j == k term left out
    om = omegas[idx]
    diff = om[None, :] - om[:, None]
    np.fill_diagonal(diff, np.inf)
    return (np.exp(1j * phases[idx])[None, :] / diff).sum(axis=1) / norm


def tilde_order(phases: Sequence[float], omegas: Sequence[float], controllers: Sequence[int],
                freq_gap_min: float = DEFAULT_FREQ_GAP) -> tuple[np.ndarray, np.ndarray]:
    """Per-controller frequency-weighted order parameter ``(R~, psi~)``.

    Averages ``e^{i phi_j} / (omega_j - omega_k)`` over the other controllers
    ``j``, normalised by the controller count.
    """
    ph = np.asarray(phases, dtype=float)
    om = np.asarray(omegas, dtype=float)
    idx = np.asarray(controllers, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("tilde order needs at least one controller")
    _check_gaps(om[idx], freq_gap_min)
    z = _tilde(ph, om, idx, len(idx))
    return np.abs(z), np.angle(z) % TWO_PI


def control_signal(sys: OscillatorSystem, ctl: ControlConfig) -> np.ndarray:
    """Per-node injected signal.

    A controller ``k`` receives ``-(c K^2 / 4) R R~_k cos(psi - phi_k)``; an
    uncontrolled node receives ``neighbor_decay`` times the sum of the signals of
    adjacent controllers, and nothing when no controller is adjacent.
    """
    n = sys.graph.n_nodes
    out = np.zeros(n)
    if not ctl.controllers:
        return out
    idx = np.asarray(ctl.controllers)
    rt, _ = tilde_order(sys.phases, sys.omegas, idx, ctl.freq_gap_min)
    op = order_parameter(sys.phases)
    h = -(ctl.strength * sys.coupling ** 2 / 4.0) * op.R * rt * np.cos(op.psi - sys.phases[idx])
    out[idx] = h
    is_ctrl = np.zeros(n, dtype=bool)
    is_ctrl[idx] = True
    adj = sys.graph.adjacency
    for a, l in enumerate(idx):
        nb = adj[l] & ~is_ctrl
        out[nb] += ctl.neighbor_decay * h[a]
    return out


def rhs(sys: OscillatorSystem, ctl: ControlConfig | None = None) -> np.ndarray:
    """Phase velocities of the (optionally controlled) Kuramoto model."""
    ph = sys.phases
    n = sys.graph.n_nodes
    a = sys.graph.adjacency
    coupling = (a * np.sin(ph[None, :] - ph[:, None])).sum(axis=1)
    out = sys.omegas + (sys.coupling / n) * coupling
    if ctl is not None:
        out = out + control_signal(sys, ctl)
    return out


def full_control_terms(phases: Sequence[float], omegas: Sequence[float],
                       freq_gap_min: float = DEFAULT_FREQ_GAP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three bracketed terms of the unsimplified control law, per node.

    Uses the all-node ``R~`` (normalised by ``N``) with every resonant
    ``j == k`` term left out. The full signal is
    ``-(K^2/4) * (t1 - t2 - t3)``.
    """
    ph = np.asarray(phases, dtype=float)
    om = np.asarray(omegas, dtype=float)
    n = len(ph)
    _check_gaps(om, freq_gap_min)
    op = order_parameter(ph)
    z = _tilde(ph, om, np.arange(n), n)
    rt, pt = np.abs(z), np.angle(z)
    t1 = op.R * rt * np.cos(op.psi - pt)
    # t2_k = (1/N) sum_l cos(phi_l - phi_k) cos(psi~_l - phi_l) R~_l
    t2 = (np.cos(ph[None, :] - ph[:, None]) * (np.cos(pt - ph) * rt)[None, :]).sum(axis=1) / n
    dw = om[:, None] - om[None, :]
    np.fill_diagonal(dw, np.inf)
    t3 = (np.sin(ph[:, None] - ph[None, :]) / dw * np.sin(op.psi - ph)[None, :]).sum(axis=1) * op.R
    return t1, t2, t3


def full_control_reference(phases: Sequence[float], omegas: Sequence[float], coupling: float,
                           freq_gap_min: float = DEFAULT_FREQ_GAP) -> np.ndarray:
    t1, t2, t3 = full_control_terms(phases, omegas, freq_gap_min)
    return -(coupling ** 2 / 4.0) * (t1 - t2 - t3)


def controller_weights(omegas: np.ndarray, controllers: Sequence[int]) -> np.ndarray:
    """``W[a, b] = 1 / (M (omega_b - omega_a))`` over controllers, zero diagonal."""
    om = np.asarray(omegas, dtype=float)[np.asarray(controllers, dtype=np.int64)]
    m = len(om)
    if m == 0:
        return np.zeros((0, 0))
    diff = om[None, :] - om[:, None]
    np.fill_diagonal(diff, np.inf)
    return np.ascontiguousarray(1.0 / (m * diff))


def integrate(sys: OscillatorSystem, ctl: ControlConfig | None = None, dt: float = DEFAULT_DT,
              t_end: float = DEFAULT_T_END, record_every: int = 1, keep_phases: bool = False,
              kernels=None) -> Trajectory:
    """Fixed-step classical RK4 from ``t = 0`` to ``t_end``.

    ``R(t)`` is recorded every ``record_every`` steps (step 0 included); phases
    are reduced mod ``2 pi`` at each recording.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    n_steps = int(round(t_end / dt))
    kern = backend.get() if kernels is None else (backend.get(kernels) if isinstance(kernels, str) else kernels)
    indptr, indices = sys.graph.csr
    if ctl is None or not ctl.controllers or ctl.strength == 0.0:
        ctrl = np.zeros(0, dtype=np.int32)
        weights = np.zeros((0, 0))
        gain, decay = 0.0, DEFAULT_NEIGHBOR_DECAY
    else:
        ctrl = np.asarray(ctl.controllers, dtype=np.int32)
        _check_gaps(sys.omegas[ctrl], ctl.freq_gap_min)
        weights = controller_weights(sys.omegas, ctrl)
        gain = ctl.strength * sys.coupling ** 2 / 4.0
        decay = ctl.neighbor_decay
    r, x, snaps, bad = kern.integrate_rk4(
        indptr, indices, sys.omegas, sys.phases, sys.coupling / sys.graph.n_nodes,
        ctrl, weights, float(gain), float(decay), float(dt), n_steps, int(record_every), keep_phases)
    if bad >= 0:
        raise IntegrationError(int(bad))
    times = np.arange(len(r)) * record_every * dt
    return Trajectory(times, np.asarray(r), np.mod(np.asarray(x), TWO_PI),
                      np.asarray(snaps) if keep_phases else None)


def draw_frequencies(n: int, rng: np.random.Generator, mean: float = OMEGA_MEAN,
                     std: float = OMEGA_STD, gap_min: float = DEFAULT_FREQ_GAP) -> np.ndarray:
    """Normal natural frequencies with every pairwise gap at least ``gap_min``.

    Entries closer than ``gap_min`` to an earlier entry are redrawn.
    """
    om = rng.normal(mean, std, size=n)
    for i in range(1, n):
        while np.min(np.abs(om[:i] - om[i])) < gap_min:
            om[i] = rng.normal(mean, std)
    return om


def draw_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, TWO_PI, size=n)
