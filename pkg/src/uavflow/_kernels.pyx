# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython implementations of the hot per-slot kernels.

Numerically identical to `_kernels_py`; see that module for semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, exp, asin, pow, M_PI

cnp.import_array()

BACKEND = "cython"


def sparsemax_batch(z):
    z = np.ascontiguousarray(z, dtype=np.float64)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
    if not np.all(np.isfinite(z)):
        raise ValueError("sparsemax requires finite inputs")
    out = np.empty_like(z)
    _sparsemax_rows(z, np.sort(z, axis=1), out)
    return out[0] if squeeze else out


cdef void _sparsemax_rows(double[:, ::1] z, double[:, ::1] srt, double[:, ::1] out) noexcept:
    cdef Py_ssize_t b, j, k, n_rows = z.shape[0], n = z.shape[1]
    cdef double cssv, tau, v
    cdef Py_ssize_t rho
    for b in range(n_rows):
        cssv = 0.0
        rho = 0
        tau = 0.0
        for k in range(n):
            v = srt[b, n - 1 - k]          # descending order
            cssv += v
            if v - (cssv - 1.0) / (k + 1) > 0.0:
                rho = k + 1
                tau = (cssv - 1.0) / (k + 1)
        for j in range(n):
            v = z[b, j] - tau
            out[b, j] = v if v > 0.0 else 0.0


def pair_gains(pos, gbs, double beta0_lin, double d1, double d2,
               double eta_los_lin, double eta_nlos_lin, double ple,
               double fc, double c_light):
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    gbs = np.ascontiguousarray(gbs, dtype=np.float64)
    cdef Py_ssize_t m = pos.shape[0]
    dist = np.zeros((m, m + 1))
    h = np.zeros((m, m + 1))
    _pair_gains(pos, gbs, beta0_lin, d1, d2, eta_los_lin, eta_nlos_lin,
                ple, fc, c_light, dist, h)
    return dist, h


cdef void _pair_gains(double[:, ::1] pos, double[::1] gbs, double beta0_lin,
                      double d1, double d2, double eta_los_lin,
                      double eta_nlos_lin, double ple, double fc,
                      double c_light, double[:, ::1] dist,
                      double[:, ::1] h) noexcept:
    cdef Py_ssize_t m = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, d, theta, p_los, fs, loss, ratio
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            dz = pos[i, 2] - pos[j, 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            dist[i, j] = d
            h[i, j] = beta0_lin / (d * d)
        dx = pos[i, 0] - gbs[0]
        dy = pos[i, 1] - gbs[1]
        dz = pos[i, 2] - gbs[2]
        d = sqrt(dx * dx + dy * dy + dz * dz)
        dist[i, m] = d
        ratio = pos[i, 2] / d
        if ratio > 1.0:
            ratio = 1.0
        elif ratio < -1.0:
            ratio = -1.0
        theta = asin(ratio) * 180.0 / M_PI
        p_los = 1.0 / (1.0 + d1 * exp(-d2 * (theta - d1)))
        fs = pow(4.0 * M_PI * fc * d / c_light, ple)
        loss = p_los * eta_los_lin * fs + (1.0 - p_los) * eta_nlos_lin * fs
        h[i, m] = 1.0 / loss


def sinr_table(h, sub, active, double p_tx, double noise, int num_subchannels):
    h = np.ascontiguousarray(h, dtype=np.float64)
    sub = np.ascontiguousarray(sub, dtype=np.int64)
    active = np.ascontiguousarray(active, dtype=np.uint8)
    sinr = np.zeros_like(h)
    power = np.zeros((num_subchannels, h.shape[1]))
    _sinr_table(h, sub, active, p_tx, noise, power, sinr)
    return sinr


cdef void _sinr_table(double[:, ::1] h, cnp.int64_t[::1] sub,
                      cnp.uint8_t[::1] active, double p_tx, double noise,
                      double[:, ::1] power, double[:, ::1] sinr) noexcept:
    cdef Py_ssize_t m = h.shape[0], cols = h.shape[1]
    cdef Py_ssize_t i, j
    cdef double interf
    for i in range(m):
        if active[i]:
            for j in range(cols):
                power[sub[i], j] += p_tx * h[i, j]
    for i in range(m):
        if not active[i]:
            continue
        for j in range(cols):
            interf = power[sub[i], j] - p_tx * h[i, j]
            sinr[i, j] = p_tx * h[i, j] / (noise + interf)
        sinr[i, i] = 0.0
