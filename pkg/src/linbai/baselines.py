"""Reference sampling strategies sharing the track-and-stop stopping rule.

The oracle tracks a true optimal allocation computed from the real parameter;
the static baseline tracks an arbitrary user-supplied allocation. Both keep
the forced-exploration rule and the dimension-only stopping threshold, so
comparisons against the adaptive algorithm are threshold-controlled.
"""
from __future__ import annotations

import numpy as np

from . import constants
from .allocation import Allocation, optimize_allocation, weighted_gram
from .errors import InvalidInputError
from .instance import Instance
from .linalg import SymMatrix, min_eigenvalue
from .lts import StopConfig, run_lts
from .records import RunRecord


def oracle_allocation(instance: Instance, tol: float = 1e-6, max_iter: int = 200_000) -> Allocation:
    """An optimal allocation computed from the true parameter."""
    return optimize_allocation(instance.mu, instance.arm_set, tol=tol, max_iter=max_iter).allocation


def run_oracle_tracking(
    instance: Instance,
    cfg: StopConfig,
    seed: int = 0,
    allocation: Allocation | None = None,
    max_rounds: int = constants.MAX_ROUNDS,
) -> RunRecord:
    """Track a fixed optimal allocation; stop with the shared stopping rule.

    Pass `allocation` to reuse one oracle solution across trials.
    """
    if allocation is None:
        allocation = oracle_allocation(instance)
    return run_lts(
        instance,
        cfg,
        seed=seed,
        fixed_allocation=allocation,
        algorithm="oracle",
        max_rounds=max_rounds,
    )


def run_static(
    instance: Instance,
    cfg: StopConfig,
    seed: int,
    w: Allocation,
    max_rounds: int = constants.MAX_ROUNDS,
    algorithm: str = "static",
) -> RunRecord:
    """Track an arbitrary fixed allocation with an invertible weighted design."""
    design = SymMatrix(weighted_gram(instance.arm_set, w.weights))
    if min_eigenvalue(design) <= 0:
        raise InvalidInputError("static allocation has a singular weighted design")
    return run_lts(
        instance,
        cfg,
        seed=seed,
        fixed_allocation=w,
        algorithm=algorithm,
        max_rounds=max_rounds,
    )
