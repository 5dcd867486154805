# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Operation-for-operation mirror of _kernels_py (same accumulation order over
the ambient dimension) so both backends produce identical floats. Compiled
with -ffp-contract=off to keep fused multiply-adds from changing results.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log, log1p, sqrt

BACKEND_NAME = "compiled"


def min_gap_ratio_scan(double[:, ::1] arms, double[:, ::1] ginv, double[::1] mu,
                       Py_ssize_t ref, double eps):
    """See _kernels_py.min_gap_ratio_scan."""
    cdef Py_ssize_t n = arms.shape[0]
    cdef Py_ssize_t d = arms.shape[1]
    cdef Py_ssize_t a, j, k, best_idx = -1
    cdef double g, q, mk, s, val, best = INFINITY
    cdef double[::1] diff = np.empty(d)
    for a in range(n):
        if a == ref:
            continue
        for j in range(d):
            diff[j] = arms[ref, j] - arms[a, j]
        g = diff[0] * mu[0]
        for j in range(1, d):
            g = g + diff[j] * mu[j]
        q = 0.0
        for k in range(d):
            mk = diff[0] * ginv[0, k]
            for j in range(1, d):
                mk = mk + diff[j] * ginv[j, k]
            q = q + mk * diff[k]
        s = g + eps
        if q > 0.0:
            if s > 0.0:
                val = s * s / (2.0 * q)
            elif s < 0.0:
                val = -(s * s) / (2.0 * q)
            else:
                val = 0.0
        else:
            if s > 0.0:
                val = INFINITY
            elif s < 0.0:
                val = -INFINITY
            else:
                val = 0.0
        if val < best:
            best = val
            best_idx = a
    if best_idx < 0:
        for a in range(n):
            if a != ref:
                best_idx = a
                break
    return best, best_idx


def abs_dot_argmax(double[:, ::1] arms, double[::1] v):
    """See _kernels_py.abs_dot_argmax."""
    cdef Py_ssize_t n = arms.shape[0]
    cdef Py_ssize_t d = arms.shape[1]
    cdef Py_ssize_t a, j, best_idx = 0
    cdef double s, s2, best = -INFINITY
    for a in range(n):
        s = arms[a, 0] * v[0]
        for j in range(1, d):
            s = s + arms[a, j] * v[j]
        s2 = s * s
        if s2 > best:
            best = s2
            best_idx = a
    return best_idx


def sphere_block_scan(double[::1] rewards, Py_ssize_t dim, double sigma, double c,
                      double delta, double eps, double[::1] moment,
                      cnp.int64_t[::1] counts, long long t0):
    """See _kernels_py.sphere_block_scan."""
    cdef Py_ssize_t nrounds = rewards.shape[0]
    cdef Py_ssize_t i, j
    cdef long long t, nmin, ceil_td
    cdef double sigma2 = sigma * sigma
    cdef double mu_norm2, half_logdet, zeta, ratio, tf, nminf, ceilf, L, x, eps_t, gap, Z, rho
    if t0 % dim != 0 or nrounds % dim != 0:
        raise ValueError("block must be aligned to whole round-robin cycles")
    for i in range(nrounds):
        j = (t0 + i) % dim
        moment[j] += rewards[i]
        counts[j] += 1
        t = t0 + i + 1
        nmin = t // dim
        if nmin < 1 or nmin < c:
            continue
        mu_norm2 = 0.0
        half_logdet = 0.0
        for j in range(dim):
            ratio = moment[j] / counts[j]
            mu_norm2 = mu_norm2 + ratio * ratio
            half_logdet = half_logdet + log1p(counts[j] / c)
        if mu_norm2 <= 0.0:
            continue
        tf = <double> t
        zeta = 0.5 * half_logdet + log(4.0 * tf * tf / delta)
        ceil_td = (t + dim - 1) // dim
        ceilf = <double> ceil_td
        L = log(8.0 * ceilf * tf * tf / delta)
        x = eps / sqrt(4.0 * sigma2 * L)
        eps_t = eps / (1.0 + x)
        gap = eps * x / (1.0 + x)
        nminf = <double> nmin
        Z = eps_t * sqrt(mu_norm2) * nminf
        rho = 4.0 * sigma2 * (eps_t * eps_t) * zeta / (gap * gap)
        if Z >= 2.0 * sigma2 * zeta and nminf >= rho / mu_norm2:
            return t
    return -1
