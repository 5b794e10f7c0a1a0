"""Pure numpy fallback with the same interface as the compiled ``_kernels``."""

from __future__ import annotations

import numpy as np
from scipy import sparse

TWO_PI = 2.0 * np.pi


def integrate_rk4(indptr, indices, omega, phase0, kn, ctrl, weights, gain, decay,
                  dt, n_steps, record_every, keep_phases=False):
    indptr = np.asarray(indptr)
    indices = np.asarray(indices)
    omega = np.asarray(omega, dtype=float)
    ctrl = np.asarray(ctrl, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    n = len(omega)
    adj = sparse.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
    active = len(ctrl) > 0 and gain != 0.0
    if active:
        is_ctrl = np.zeros(n, dtype=bool)
        is_ctrl[ctrl] = True
        # spread[j, a] = decay when uncontrolled j neighbours controller a
        spread = adj[:, ctrl].toarray() * decay
        spread[is_ctrl] = 0.0

    def rhs(x):
        s, c = np.sin(x), np.cos(x)
        zr, zi = c.mean(), s.mean()
        f = omega + kn * (c * (adj @ s) - s * (adj @ c))
        if active:
            sc, cc = s[ctrl], c[ctrl]
            rt = np.hypot(weights @ cc, weights @ sc)
            h = -gain * rt * (zr * cc + zi * sc)
            f[ctrl] += h
            f += spread @ h
        return f

    n_rec = n_steps // record_every + 1
    r_out = np.empty(n_rec)
    snaps = np.empty((n_rec if keep_phases else 0, n))
    x = np.array(phase0, dtype=float)
    rec = 0
    bad = -1
    half, sixth = 0.5 * dt, dt / 6.0
    for step in range(n_steps + 1):
        if step % record_every == 0:
            if not np.all(np.isfinite(x)):
                bad = step
                break
            x = np.mod(x, TWO_PI)
            r_out[rec] = np.abs(np.exp(1j * x).sum()) / n
            if keep_phases:
                snaps[rec] = x
            rec += 1
        if step == n_steps:
            break
        k1 = rhs(x)
        k2 = rhs(x + half * k1)
        k3 = rhs(x + half * k2)
        k4 = rhs(x + dt * k3)
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r_out[:rec], x, snaps[:rec], bad
