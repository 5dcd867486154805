"""Incremental least-squares estimation and run sufficient statistics."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .instance import ArmSet
from .linalg import SymMatrix, inverse_psd, min_eigenvalue, rank_one_update, solve_psd


class DesignState:
    """Sufficient statistics of one run: pull counts, Gram matrix, response moment.

    The least-squares estimate, the inverse Gram matrix and the smallest
    eigenvalue are cached and recomputed lazily after each update, so the
    cached values always agree with (gram, moment) when read. Single-writer:
    one run owns the state.
    """

    def __init__(self, dim: int, n_arms: int | None = None):
        if dim < 1:
            raise InvalidInputError("dimension must be >= 1")
        self.dim = dim
        self.t = 0
        self.counts = np.zeros(n_arms, dtype=np.int64) if n_arms is not None else None
        self.gram = SymMatrix.zeros(dim)
        self.moment = np.zeros(dim)
        self._mu_hat: np.ndarray | None = np.zeros(dim)
        self._min_eig: float | None = 0.0
        self._gram_inv: np.ndarray | None = None

    def update(self, arm, arm_index: int | None, reward: float) -> None:
        arm = np.asarray(arm, dtype=float)
        if arm.shape != (self.dim,):
            raise InvalidInputError(f"arm has shape {arm.shape}, expected ({self.dim},)")
        self.gram = rank_one_update(self.gram, arm)
        self.moment = self.moment + arm * float(reward)
        if self.counts is not None:
            if arm_index is None:
                raise InvalidInputError("finite-arm state updates need the arm index")
            self.counts[arm_index] += 1
        self.t += 1
        self._mu_hat = None
        self._min_eig = None
        self._gram_inv = None

    def estimate(self) -> np.ndarray:
        """Least-squares estimate of mu; the zero vector before any data."""
        if self._mu_hat is None:
            if self.t == 0:
                self._mu_hat = np.zeros(self.dim)
            else:
                self._mu_hat = solve_psd(self.gram, self.moment)
        return self._mu_hat

    @property
    def min_eig(self) -> float:
        if self._min_eig is None:
            self._min_eig = min_eigenvalue(self.gram)
        return self._min_eig

    @property
    def gram_inv(self) -> np.ndarray:
        """Pseudo-inverse of the Gram matrix (exact inverse once full rank)."""
        if self._gram_inv is None:
            self._gram_inv = inverse_psd(self.gram)
        return self._gram_inv


def empirical_best_arm(state: DesignState, arm_set: ArmSet) -> int:
    """Index maximizing mu_hat^T a; ties resolve to the lowest index."""
    if arm_set.kind != "finite":
        raise InvalidInputError("empirical_best_arm needs a finite arm set")
    return int(np.argmax(arm_set.arms @ state.estimate()))


def best_arm_gap(state: DesignState, arm_set: ArmSet) -> float:
    """Gap between the top two empirical arm values (0 for ties)."""
    values = arm_set.arms @ state.estimate()
    if values.shape[0] < 2:
        return float("inf")
    top2 = np.partition(values, -2)[-2:]
    return float(top2[1] - top2[0])
