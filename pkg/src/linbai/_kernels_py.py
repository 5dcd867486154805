"""Pure-numpy implementations of the hot kernels.

These mirror the compiled versions in _speedups.pyx operation for operation:
all reductions over the ambient dimension run as explicit sequential loops so
both backends produce identical floating-point results.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def min_gap_ratio_scan(arms, ginv, mu, ref, eps):
    """Minimum over arms a != ref of sgn(g+eps) * (g+eps)^2 / (2 q).

    g = mu . (arms[ref] - arms[a]) and q = (arms[ref]-arms[a]) ginv (arms[ref]-arms[a]).
    Degenerate arms with q == 0 contribute +inf when g+eps > 0, -inf when
    g+eps < 0 and 0 at the sign boundary. Returns (value, argmin index); ties
    resolve to the lowest index.
    """
    arms = np.asarray(arms, dtype=float)
    ginv = np.asarray(ginv, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n, d = arms.shape
    diffs = arms[ref][None, :] - arms
    g = diffs[:, 0] * mu[0]
    for j in range(1, d):
        g = g + diffs[:, j] * mu[j]
    q = np.zeros(n)
    for k in range(d):
        mk = diffs[:, 0] * ginv[0, k]
        for j in range(1, d):
            mk = mk + diffs[:, j] * ginv[j, k]
        q = q + mk * diffs[:, k]
    s = g + eps
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.sign(s) * s * s / (2.0 * q)
    degenerate = ~(q > 0.0)
    if degenerate.any():
        vals = np.where(degenerate & (s > 0.0), np.inf, vals)
        vals = np.where(degenerate & (s < 0.0), -np.inf, vals)
        vals = np.where(degenerate & (s == 0.0), 0.0, vals)
    vals[ref] = np.inf
    idx = int(np.argmin(vals))
    if idx == ref:  # every candidate tied at +inf and argmin landed on ref
        idx = 0 if ref != 0 else 1
    return float(vals[idx]), idx


def abs_dot_argmax(arms, v):
    """Index of the arm maximizing (a . v)^2; ties resolve to the lowest index."""
    arms = np.asarray(arms, dtype=float)
    v = np.asarray(v, dtype=float)
    d = arms.shape[1]
    s = arms[:, 0] * v[0]
    for j in range(1, d):
        s = s + arms[:, j] * v[j]
    return int(np.argmax(s * s))


def sphere_block_scan(rewards, dim, sigma, c, delta, eps, moment, counts, t0):
    """Advance the round-robin sphere run through one block of rewards.

    rewards[i] is the observed reward of round t0+i+1, which sampled basis
    coordinate (t0+i) % dim. Requires t0 and len(rewards) to be multiples of
    dim. Mutates moment (float64[dim]) and counts (int64[dim]) in place, up to
    the stopping round when the stopping rule fires inside the block (the
    return value, else -1, with state advanced to the block end).
    """
    rewards = np.asarray(rewards, dtype=float)
    d = int(dim)
    if t0 % d != 0 or rewards.shape[0] % d != 0:
        raise ValueError("block must be aligned to whole round-robin cycles")
    m = rewards.shape[0] // d
    if m == 0:
        return -1
    R = rewards.reshape(m, d)
    # Fold the carry into the running sums so the accumulation order matches
    # the compiled per-round loop exactly.
    csum = np.cumsum(np.vstack([np.asarray(moment)[None, :], R]), axis=0)
    prev = csum[:-1]
    n0 = t0 // d
    sigma2 = sigma * sigma
    ks = np.arange(m, dtype=np.int64)

    best_t = -1
    for r in range(1, d + 1):
        t = t0 + ks * d + r
        nmin = t // d
        feasible = (nmin >= 1) & (nmin >= c)
        if not feasible.any():
            continue
        tf = t.astype(float)
        nminf = nmin.astype(float)
        mu_norm2 = np.zeros(m)
        half_logdet = np.zeros(m)
        for j in range(d):
            nj = (n0 + ks + (1 if j < r else 0)).astype(float)
            mj = prev[:, j] + (R[:, j] if j < r else 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(nj > 0, mj / np.where(nj > 0, nj, 1.0), 0.0)
            mu_norm2 = mu_norm2 + ratio * ratio
            half_logdet = half_logdet + np.log1p(np.where(nj > 0, nj, 0.0) / c)
        zeta = 0.5 * half_logdet + np.log(4.0 * tf * tf / delta)
        ceilf = ((t + d - 1) // d).astype(float)
        L = np.log(8.0 * ceilf * tf * tf / delta)
        x = eps / np.sqrt(4.0 * sigma2 * L)
        eps_t = eps / (1.0 + x)
        gap = eps * x / (1.0 + x)
        Z = eps_t * np.sqrt(mu_norm2) * nminf
        rho = 4.0 * sigma2 * (eps_t * eps_t) * zeta / (gap * gap)
        with np.errstate(divide="ignore", invalid="ignore"):
            design_ok = nminf >= np.where(mu_norm2 > 0, rho / np.where(mu_norm2 > 0, mu_norm2, 1.0), np.inf)
        cond = feasible & (mu_norm2 > 0.0) & (Z >= 2.0 * sigma2 * zeta) & design_ok
        hits = np.nonzero(cond)[0]
        if hits.size:
            t_hit = int(t[hits[0]])
            if best_t < 0 or t_hit < best_t:
                best_t = t_hit

    if best_t < 0:
        moment[:] = csum[-1]
        counts += m
        return -1
    ki = (best_t - t0 - 1) // d
    ri = best_t - t0 - ki * d
    for j in range(d):
        moment[j] = prev[ki, j] + (R[ki, j] if j < ri else 0.0)
        counts[j] = n0 + ki + (1 if j < ri else 0)
    return best_t
