"""The allocation objective, its maximizer, and the sample-complexity lower bound.

The objective per allocation w is the smallest, over suboptimal arms a, of

    (mu.(a* - a))^2 / (2 (a* - a)^T A(w)^{-1} (a* - a)),   A(w) = sum_a w_a a a^T,

a concave function of w whose maximum value is the inverse of the instance's
characteristic time. It is maximized over the simplex with Frank-Wolfe using
the classical 2/(k+2) step and the Frank-Wolfe gap as stopping certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants, kernels
from .errors import InvalidInputError, InvalidInstanceError, SingularDesignError
from .instance import ArmSet

import logging

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Allocation:
    """A point of the simplex over arms, with support bookkeeping."""

    weights: np.ndarray
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.shape[0] < 1:
            raise InvalidInputError("allocation weights must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("allocation weights must be finite and non-negative")
        if abs(float(np.sum(w)) - 1.0) > constants.ALLOCATION_SUM_TOL:
            raise InvalidInputError(f"allocation weights must sum to 1, got {np.sum(w)!r}")
        object.__setattr__(self, "support", np.nonzero(w > constants.SUPPORT_CUTOFF)[0])

    @property
    def support_size(self) -> int:
        return int(self.support.shape[0])

    @classmethod
    def uniform(cls, n: int) -> "Allocation":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class OptimizerResult:
    allocation: Allocation
    value: float
    iterations: int
    converged: bool
    duality_gap_estimate: float


def best_arm_of(mu, arms: ArmSet) -> int:
    """Argmax of mu over the arms; raises when the top two are within tolerance."""
    values = arms.arms @ np.asarray(mu, dtype=float)
    order = np.argsort(values)
    if values[order[-1]] - values[order[-2]] <= constants.BEST_ARM_GAP_TOL:
        raise InvalidInstanceError("best arm of mu is not unique")
    return int(np.argmax(values))


def weighted_gram(arms: ArmSet, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return (arms.arms * w[:, None]).T @ arms.arms


def _design_inverse(design: np.ndarray):
    """Inverse of A(w), or None when A(w) is singular at the working cutoff."""
    eigs, vecs = np.linalg.eigh(design)
    if eigs[0] <= constants.PSI_SINGULAR_REL * max(float(eigs[-1]), 0.0):
        return None
    return (vecs / eigs) @ vecs.T


def _inv_unchecked(design: np.ndarray) -> np.ndarray:
    """Fast inverse for the optimizer's inner loop; the design is known invertible."""
    if design.shape[0] == 2:
        a = float(design[0, 0])
        b = float(design[0, 1])
        c = float(design[1, 1])
        det = a * c - b * b
        return np.array([[c / det, -b / det], [-b / det, a / det]])
    return np.linalg.inv(design)


def psi(mu, w: Allocation | np.ndarray, arms: ArmSet) -> float:
    """The allocation objective; 0 when the weighted design is singular."""
    weights = w.weights if isinstance(w, Allocation) else np.asarray(w, dtype=float)
    astar = best_arm_of(mu, arms)
    inv = _design_inverse(weighted_gram(arms, weights))
    if inv is None:
        return 0.0
    val, _ = kernels.min_gap_ratio_scan(arms.arms, inv, np.asarray(mu, dtype=float), astar, 0.0)
    return float(val)


def psi_supergradient(mu, w: Allocation | np.ndarray, arms: ArmSet) -> np.ndarray:
    """A supergradient of the objective at w.

    With a- the minimizing arm (ties to the lowest index), u = a* - a- and
    v = A(w)^{-1} u, the component for arm b is (mu.u)^2 (b.v)^2 / (2 (u.v)^2).
    """
    weights = w.weights if isinstance(w, Allocation) else np.asarray(w, dtype=float)
    mu = np.asarray(mu, dtype=float)
    astar = best_arm_of(mu, arms)
    inv = _design_inverse(weighted_gram(arms, weights))
    if inv is None:
        raise SingularDesignError("weighted design is singular; supergradient undefined")
    _, amin = kernels.min_gap_ratio_scan(arms.arms, inv, mu, astar, 0.0)
    u = arms.arms[astar] - arms.arms[amin]
    v = inv @ u
    quad = float(u @ v)
    gap = float(mu @ u)
    scale = gap * gap / (2.0 * quad * quad)
    scores = arms.arms @ v
    return scale * scores * scores


def greedy_spanning_subset(arms: ArmSet) -> np.ndarray:
    """d arm indices chosen greedily for maximal spanned volume.

    First the largest-norm arm, then repeatedly the arm with the largest
    residual after projecting out the span of the chosen ones. Deterministic:
    ties resolve to the lowest index.
    """
    a = arms.arms
    n, d = a.shape
    chosen: list[int] = []
    basis = np.zeros((0, d))
    residual = np.einsum("ij,ij->i", a, a)
    for _ in range(d):
        idx = int(np.argmax(residual))
        if residual[idx] <= 0:
            raise InvalidInstanceError("arms do not span the ambient space")
        vec = a[idx].astype(float)
        for b in basis:
            vec = vec - (vec @ b) * b
        norm = float(np.linalg.norm(vec))
        if norm <= 0:
            raise InvalidInstanceError("arms do not span the ambient space")
        basis = np.vstack([basis, vec / norm])
        chosen.append(idx)
        proj = a @ basis[-1]
        residual = residual - proj * proj
        residual[chosen] = -np.inf
    return np.array(sorted(chosen), dtype=np.int64)


def initial_allocation(arms: ArmSet) -> Allocation:
    """Half uniform on a greedy spanning subset, half uniform globally."""
    n = arms.n_arms
    idxs = greedy_spanning_subset(arms)
    w = np.full(n, 0.5 / n)
    w[idxs] += 0.5 / idxs.shape[0]
    return Allocation(w)


def optimize_allocation(
    mu,
    arms: ArmSet,
    warm_start: Allocation | None = None,
    tol: float = 1e-6,
    max_iter: int = 200_000,
) -> OptimizerResult:
    """Maximize the allocation objective over the simplex by Frank-Wolfe.

    Steps are w <- (1-gamma) w + gamma e_b with b the supergradient argmax
    and gamma = 2/(k+2); the step index starts at k=1 so gamma < 1 always and
    the weighted design stays invertible from any invertible start. Stops
    when the Frank-Wolfe gap drops below tol (converged) or after max_iter
    gap evaluations. Returns the best iterate seen.
    """
    mu = np.asarray(mu, dtype=float)
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")
    astar = best_arm_of(mu, arms)
    arm_mat = arms.arms
    if warm_start is not None:
        if warm_start.weights.shape[0] != arms.n_arms:
            raise InvalidInputError("warm start has the wrong number of arms")
        w = warm_start.weights.copy()
    else:
        w = initial_allocation(arms).weights.copy()
    design = weighted_gram(arms, w)

    if _design_inverse(design) is None:
        # Only reachable from a singular warm start; blend until invertible.
        w = 0.5 * w + 0.5 * initial_allocation(arms).weights
        design = weighted_gram(arms, w)

    best_val = -np.inf
    best_w = w.copy()
    gap_estimate = np.inf
    converged = False
    iterations = 0
    for k in range(1, max_iter + 1):
        iterations = k
        inv = _inv_unchecked(design)
        val, amin = kernels.min_gap_ratio_scan(arm_mat, inv, mu, astar, 0.0)
        if val > best_val:
            best_val = val
            best_w = w.copy()
        u = arm_mat[astar] - arm_mat[amin]
        v = inv @ u
        quad = float(u @ v)
        gap_mu = float(mu @ u)
        scale = gap_mu * gap_mu / (2.0 * quad * quad)
        b = kernels.abs_dot_argmax(arm_mat, v)
        sb = float(arm_mat[b] @ v)
        # g.(e_b - w) with g the supergradient; g.w collapses to scale * u A^{-1} u.
        gap_estimate = scale * (sb * sb - quad)
        if gap_estimate <= tol:
            converged = True
            break
        gamma = 2.0 / (k + 2.0)
        w *= 1.0 - gamma
        w[b] += gamma
        design = (1.0 - gamma) * design + gamma * np.outer(arm_mat[b], arm_mat[b])
        if k % 4096 == 0:
            # Refresh against accumulated drift from the incremental updates.
            design = weighted_gram(arms, w)

    if not converged:
        log.debug("frank-wolfe hit max_iter=%d with gap %.3g", max_iter, gap_estimate)
    total = float(np.sum(best_w))
    return OptimizerResult(
        allocation=Allocation(best_w / total),
        value=float(best_val),
        iterations=iterations,
        converged=converged,
        duality_gap_estimate=float(gap_estimate),
    )


def characteristic_time(mu, arms: ArmSet, tol: float = 1e-6, max_iter: int = 200_000) -> float:
    """1 / (max over allocations of the objective)."""
    result = optimize_allocation(mu, arms, tol=tol, max_iter=max_iter)
    if result.value <= 0:
        raise InvalidInstanceError("optimal allocation value is not positive")
    return 1.0 / result.value


def kl_bernoulli(a: float, b: float) -> float:
    """KL divergence between Bernoulli(a) and Bernoulli(b), a, b in (0, 1)."""
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise InvalidInputError("kl_bernoulli needs arguments strictly inside (0, 1)")
    return a * math.log(a / b) + (1.0 - a) * math.log((1.0 - a) / (1.0 - b))


def sample_complexity_lower_bound(instance, delta: float, tol: float = 1e-6) -> float:
    """sigma^2 * T* * kl(delta, 1-delta) for a finite instance."""
    if not (0.0 < delta < 1.0):
        raise InvalidInputError("delta must lie in (0, 1)")
    tstar = characteristic_time(instance.mu, instance.arm_set, tol=tol)
    return instance.sigma**2 * tstar * kl_bernoulli(delta, 1.0 - delta)


def d_infty(w, v) -> float:
    """Largest coordinate-wise absolute difference between two allocations."""
    wa = w.weights if isinstance(w, Allocation) else np.asarray(w, dtype=float)
    va = v.weights if isinstance(v, Allocation) else np.asarray(v, dtype=float)
    if wa.shape != va.shape:
        raise InvalidInputError(f"length mismatch: {wa.shape} vs {va.shape}")
    return float(np.max(np.abs(wa - va)))
