# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 integrator for the pinning-controlled Kuramoto model."""

import numpy as np
from libc.math cimport sin, cos, sqrt, fmod, isfinite, M_PI

ctypedef const int[::1] ivec
ctypedef const double[::1] dvec


cdef inline double _wrap(double x) nogil:
    cdef double y = fmod(x, 2.0 * M_PI)
    if y < 0.0:
        y += 2.0 * M_PI
    return y


cdef void _rhs(const int[::1] indptr, const int[::1] indices, const double[::1] omega,
               double kn, const int[::1] ctrl, const double[:, ::1] weights,
               const unsigned char[::1] is_ctrl, double gain, double decay,
               double[::1] x, double[::1] f, double[::1] s, double[::1] c,
               double[::1] h) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], m = ctrl.shape[0]
    cdef Py_ssize_t i, p, a, b, j, k
    cdef double ss, cs, zr = 0.0, zi = 0.0, tr, ti, w
    for i in range(n):
        s[i] = sin(x[i])
        c[i] = cos(x[i])
        zr += c[i]
        zi += s[i]
    zr /= n
    zi /= n
    for i in range(n):
        ss = 0.0
        cs = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            ss += s[j]
            cs += c[j]
        f[i] = omega[i] + kn * (c[i] * ss - s[i] * cs)
    if m == 0 or gain == 0.0:
        return
    for a in range(m):
        k = ctrl[a]
        tr = 0.0
        ti = 0.0
        for b in range(m):
            w = weights[a, b]
            j = ctrl[b]
            tr += w * c[j]
            ti += w * s[j]
        h[a] = -gain * sqrt(tr * tr + ti * ti) * (zr * c[k] + zi * s[k])
        f[k] += h[a]
    for a in range(m):
        k = ctrl[a]
        for p in range(indptr[k], indptr[k + 1]):
            j = indices[p]
            if not is_ctrl[j]:
                f[j] += decay * h[a]


def integrate_rk4(const int[::1] indptr, const int[::1] indices, const double[::1] omega,
                  const double[::1] phase0, double kn, const int[::1] ctrl,
                  const double[:, ::1] weights, double gain, double decay,
                  double dt, long n_steps, long record_every, bint keep_phases=False):
    """Fixed-step RK4 of the controlled Kuramoto flow.

    Returns ``(r_series, final_phases, snapshots, bad_step)``; ``bad_step`` is
    -1 on success, otherwise the first recording step with a non-finite state.
    """
    cdef Py_ssize_t n = phase0.shape[0], m = ctrl.shape[0]
    cdef Py_ssize_t i, a
    cdef long step, rec = 0, bad = -1
    cdef long n_rec = n_steps // record_every + 1
    cdef double half = 0.5 * dt, sixth = dt / 6.0, zr, zi
    x_arr = np.array(phase0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] xt = np.empty(n)
    cdef double[::1] k1 = np.empty(n)
    cdef double[::1] k2 = np.empty(n)
    cdef double[::1] k3 = np.empty(n)
    cdef double[::1] k4 = np.empty(n)
    cdef double[::1] s = np.empty(n)
    cdef double[::1] c = np.empty(n)
    cdef double[::1] h = np.empty(max(m, 1))
    mask_arr = np.zeros(n, dtype=np.uint8)
    for a in range(m):
        mask_arr[ctrl[a]] = 1
    cdef const unsigned char[::1] is_ctrl = mask_arr
    r_arr = np.empty(n_rec)
    cdef double[::1] r_out = r_arr
    snap_arr = np.empty((n_rec if keep_phases else 0, n))
    cdef double[:, ::1] snaps = snap_arr

    with nogil:
        for step in range(n_steps + 1):
            if step % record_every == 0:
                zr = 0.0
                zi = 0.0
                for i in range(n):
                    if not isfinite(x[i]):
                        bad = step
                        break
                    x[i] = _wrap(x[i])
                    zr += cos(x[i])
                    zi += sin(x[i])
                if bad >= 0:
                    break
                r_out[rec] = sqrt(zr * zr + zi * zi) / n
                if keep_phases:
                    for i in range(n):
                        snaps[rec, i] = x[i]
                rec += 1
            if step == n_steps:
                break
            _rhs(indptr, indices, omega, kn, ctrl, weights, is_ctrl, gain, decay, x, k1, s, c, h)
            for i in range(n):
                xt[i] = x[i] + half * k1[i]
            _rhs(indptr, indices, omega, kn, ctrl, weights, is_ctrl, gain, decay, xt, k2, s, c, h)
            for i in range(n):
                xt[i] = x[i] + half * k2[i]
            _rhs(indptr, indices, omega, kn, ctrl, weights, is_ctrl, gain, decay, xt, k3, s, c, h)
            for i in range(n):
                xt[i] = x[i] + dt * k3[i]
            _rhs(indptr, indices, omega, kn, ctrl, weights, is_ctrl, gain, decay, xt, k4, s, c, h)
            for i in range(n):
                x[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])

    return r_arr[:rec], x_arr, snap_arr[:rec], bad
