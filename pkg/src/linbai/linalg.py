"""Small dense symmetric-matrix kernels: eigen bounds, PSD solves, log-determinants.

Everything operates on `SymMatrix`, a thin validated wrapper around a square
numpy array. Matrices here are tiny (the ambient dimension d of the bandit),
so exact refactorization on demand beats clever incremental inverses.
"""
from __future__ import annotations

import numpy as np

from . import constants
from .errors import InvalidInputError


class SymMatrix:
    """A d x d real symmetric matrix with its dimension fixed at construction."""

    __slots__ = ("dim", "values")

    def __init__(self, values, *, copy: bool = True):
        arr = np.array(values, dtype=float, copy=copy)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise InvalidInputError("matrix dimension must be positive")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("matrix entries must be finite")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=constants.SYMMETRY_ATOL):
            raise InvalidInputError("matrix is not symmetric within tolerance")
        self.dim = arr.shape[0]
        self.values = arr

    @classmethod
    def zeros(cls, dim: int) -> "SymMatrix":
        return cls(np.zeros((dim, dim)), copy=False)

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(np.eye(dim), copy=False)

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"


def _as_sym(m) -> SymMatrix:
    return m if isinstance(m, SymMatrix) else SymMatrix(m)


def _check_vector(v, dim: int) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (dim,):
        raise InvalidInputError(f"expected a vector of length {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("vector entries must be finite")
    return arr


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    Rank-deficient inputs report exactly 0: eigenvalues whose magnitude is
    below RANK_DEFICIENT_REL * lambda_max are clamped.
    """
    m = _as_sym(m)
    eigs = np.linalg.eigvalsh(m.values)
    lo = float(eigs[0])
    hi = float(np.max(np.abs(eigs)))
    if abs(lo) <= constants.RANK_DEFICIENT_REL * max(hi, 1e-300):
        return 0.0
    return lo


def solve_psd(m, v) -> np.ndarray:
    """Least-squares solve of m x = v for PSD m.

    Uses a symmetric eigendecomposition with eigenvalues below
    PSD_CUTOFF_REL * lambda_max truncated, so singular directions are
    projected out. Coincides with m^{-1} v when m is invertible.
    """
    m = _as_sym(m)
    v = _check_vector(v, m.dim)
    eigs, vecs = np.linalg.eigh(m.values)
    lam_max = float(eigs[-1])
    cutoff = constants.PSD_CUTOFF_REL * max(lam_max, 0.0)
    inv = np.where(eigs > cutoff, 1.0, 0.0) / np.where(eigs > cutoff, eigs, 1.0)
    return vecs @ (inv * (vecs.T @ v))


def inverse_psd(m) -> np.ndarray:
    """Pseudo-inverse of a PSD matrix, same truncation rule as solve_psd."""
    m = _as_sym(m)
    eigs, vecs = np.linalg.eigh(m.values)
    lam_max = float(eigs[-1])
    cutoff = constants.PSD_CUTOFF_REL * max(lam_max, 0.0)
    inv = np.where(eigs > cutoff, 1.0, 0.0) / np.where(eigs > cutoff, eigs, 1.0)
    return (vecs * inv) @ vecs.T


def logdet_shifted(m, scale: float) -> float:
    """log det(m / scale + I), finite for any PSD m and scale > 0."""
    m = _as_sym(m)
    if not np.isfinite(scale) or scale <= 0:
        raise InvalidInputError(f"scale must be positive, got {scale}")
    shifted = m.values / scale + np.eye(m.dim)
    sign, ld = np.linalg.slogdet(shifted)
    if sign <= 0:
        # Near-PSD input with tiny negative eigenvalues; clamp and recompute.
        eigs = np.clip(np.linalg.eigvalsh(m.values), 0.0, None)
        return float(np.sum(np.log1p(eigs / scale)))
    return float(ld)


def rank_one_update(m, a) -> SymMatrix:
    """m + a a^T as a new SymMatrix."""
    m = _as_sym(m)
    a = _check_vector(a, m.dim)
    return SymMatrix(m.values + np.outer(a, a), copy=False)
