"""Lazy track-and-stop for finite arm sets.

One run interleaves three rules. The sampling rule forces a round-robin pull
from a spanning set whenever the smallest Gram eigenvalue falls below
f(t) = c0 sqrt(t), and otherwise pulls the arm whose count lags its target
allocation the most. The target allocation is re-optimized against the
current estimate only at rounds of a lazy schedule. The stopping rule halts
once the pairwise generalized log-likelihood ratio statistic clears a
threshold that depends on the ambient dimension but not on the number of arms.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .allocation import Allocation, greedy_spanning_subset, optimize_allocation
from .environment import RewardStream
from .errors import InvalidConfigError, InvalidInputError, LinbaiError, SingularDesignError
from .estimator import DesignState, best_arm_gap, empirical_best_arm
from .instance import ArmSet, Instance
from .kernels import min_gap_ratio_scan
from .linalg import SymMatrix, logdet_shifted, min_eigenvalue
from .records import RunRecord

log = logging.getLogger(__name__)

EXPONENTIAL = "exponential"
PERIODIC = "periodic"
EVERY_ROUND = "every"


@dataclass(frozen=True)
class LazySchedule:
    """The set of rounds at which the target allocation is re-optimized."""

    kind: str = EXPONENTIAL
    period: int = 1

    def __post_init__(self):
        if self.kind not in (EXPONENTIAL, PERIODIC, EVERY_ROUND):
            raise InvalidConfigError(f"unknown schedule kind {self.kind!r}")
        if self.kind == PERIODIC and self.period < 1:
            raise InvalidConfigError("periodic schedule needs period >= 1")

    def contains(self, t: int) -> bool:
        if t < 1:
            return False
        if self.kind == EVERY_ROUND:
            return True
        if self.kind == PERIODIC:
            return (t - 1) % self.period == 0
        return t & (t - 1) == 0  # powers of two

    @classmethod
    def parse(cls, text: str) -> "LazySchedule":
        text = text.strip()
        if text == "exp":
            return cls(EXPONENTIAL)
        if text == "every":
            return cls(EVERY_ROUND)
        if text.startswith("period:"):
            return cls(PERIODIC, period=int(text.split(":", 1)[1]))
        raise InvalidConfigError(f"cannot parse schedule {text!r} (use exp, every, or period:P)")


@dataclass(frozen=True)
class StopConfig:
    """Risk level and threshold constants of the stopping rule.

    `u` scales the determinant shift inside the threshold; `c` is the design
    floor required before stopping is allowed. With inflate_delta the
    threshold is evaluated at 6*delta/(pi^2 t^2) instead of delta.
    """

    delta: float
    sigma: float = 1.0
    u: float = 0.1
    c: float = 1.0
    inflate_delta: bool = False

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise InvalidConfigError("delta must lie in (0, 1)")
        if self.u <= 0 or self.c <= 0:
            raise InvalidConfigError("u and c must be positive")
        if self.sigma < 0:
            raise InvalidConfigError("sigma must be non-negative")

    @classmethod
    def from_profile(cls, profile: str, delta: float, sigma: float, arms: ArmSet) -> "StopConfig":
        c = arms.max_norm**2 if arms.kind == "finite" else 1.0
        if profile == "paper-main":
            return cls(delta=delta, sigma=sigma, u=1.0, c=c, inflate_delta=True)
        if profile == "paper-appendix":
            return cls(delta=delta, sigma=sigma, u=0.1, c=c, inflate_delta=False)
        raise InvalidConfigError(f"unknown profile {profile!r}")


class TrackerState:
    """Mutable sampling-rule state owned by a single run."""

    def __init__(self, arms: ArmSet, mode: str = "noavg", allocation: Allocation | None = None,
                 exploration_set: np.ndarray | None = None):
        if mode not in ("avg", "noavg"):
            raise InvalidConfigError(f"tracking mode must be 'avg' or 'noavg', got {mode!r}")
        self.arms = arms
        self.mode = mode
        if exploration_set is None:
            exploration_set = greedy_spanning_subset(arms)
        self.exploration_set = np.asarray(exploration_set, dtype=np.int64)
        gram = SymMatrix(sum(np.outer(arms.arms[i], arms.arms[i]) for i in self.exploration_set))
        lam = min_eigenvalue(gram)
        if lam <= 0:
            raise InvalidConfigError("exploration set does not span the ambient space")
        self.c_a0 = lam / math.sqrt(arms.dim)
        self.forced_index = 0
        self.allocation = allocation
        self.w_cumsum = np.zeros(arms.n_arms)


def f_threshold(t: int, tracker: TrackerState) -> float:
    """Forced-exploration eigenvalue floor c0 sqrt(t)."""
    if t < 0:
        raise InvalidInputError("t must be non-negative")
    return tracker.c_a0 * math.sqrt(t)


def next_arm(tracker: TrackerState, design: DesignState) -> int:
    """Forced-exploration arm when the design is weak, else the tracking arm."""
    t = design.t
    forced = t == 0 or design.min_eig < f_threshold(t, tracker)
    if not forced and tracker.allocation is not None:
        if tracker.mode == "avg":
            support = np.nonzero(tracker.w_cumsum > constants.SUPPORT_CUTOFF)[0]
            targets = tracker.w_cumsum
        else:
            support = tracker.allocation.support
            targets = t * tracker.allocation.weights
        if support.size:
            deficits = design.counts[support] - targets[support]
            return int(support[np.argmin(deficits)])
    idx = int(tracker.exploration_set[tracker.forced_index])
    tracker.forced_index = (tracker.forced_index + 1) % tracker.exploration_set.shape[0]
    return idx


def maybe_update_allocation(tracker: TrackerState, schedule: LazySchedule, design: DesignState,
                            optimizer=None) -> None:
    """Re-optimize the tracked allocation when the schedule says so.

    Skipped when the empirical best arm is tied. The cumulative allocation sum
    advances every round regardless. Optimizer failures keep the previous
    allocation and log a warning; the run continues.
    """
    if optimizer is None:
        optimizer = lambda mu, arms, warm_start: optimize_allocation(mu, arms, warm_start=warm_start)
    if schedule.contains(design.t) and best_arm_gap(design, tracker.arms) > constants.BEST_ARM_GAP_TOL:
        try:
            result = optimizer(design.estimate(), tracker.arms, tracker.allocation)
            tracker.allocation = result.allocation
        except LinbaiError as exc:
            log.warning("allocation update failed at t=%d: %s", design.t, exc)
    if tracker.allocation is not None:
        tracker.w_cumsum += tracker.allocation.weights


def gllr_pair(design: DesignState, a, b, eps: float = 0.0) -> float:
    """Pairwise generalized log-likelihood ratio statistic.

    sgn(m + eps) (m + eps)^2 / (2 (a-b)^T G^{-1} (a-b)) with m the estimated
    value difference mu_hat.(a-b) and G the Gram matrix of pulled arms.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if eps < 0:
        raise InvalidInputError("eps must be non-negative")
    if np.array_equal(a, b):
        raise InvalidInputError("gllr_pair needs two distinct arms")
    if design.min_eig <= 0:
        raise SingularDesignError("Gram matrix is singular; statistic undefined")
    diff = a - b
    m = float(design.estimate() @ diff) + eps
    quad = float(diff @ design.gram_inv @ diff)
    return float(np.sign(m)) * m * m / (2.0 * quad)


def stopping_statistic(design: DesignState, arms: ArmSet) -> tuple[float, int]:
    """(Z, empirical best arm): Z is the smallest pairwise statistic against the leader."""
    if design.min_eig <= 0:
        raise SingularDesignError("Gram matrix is singular; statistic undefined")
    a_hat = empirical_best_arm(design, arms)
    val, _ = min_gap_ratio_scan(arms.arms, design.gram_inv, design.estimate(), a_hat, 0.0)
    return max(float(val), 0.0), a_hat


def beta_threshold(design: DesignState, cfg: StopConfig, t: int) -> float:
    """Exploration threshold; grows with the log-determinant of the design."""
    delta = cfg.delta
    if cfg.inflate_delta:
        delta = 6.0 * cfg.delta / (math.pi**2 * max(t, 1) ** 2)
    half_logdet = 0.5 * logdet_shifted(design.gram, cfg.u * cfg.c)
    return (1.0 + cfg.u) * cfg.sigma**2 * (half_logdet + math.log(1.0 / delta))


def should_stop(design: DesignState, cfg: StopConfig, arms: ArmSet) -> bool:
    """Stop once the design floor holds and the statistic clears the threshold."""
    if design.min_eig < cfg.c:
        return False
    z, _ = stopping_statistic(design, arms)
    return z > beta_threshold(design, cfg, design.t)


def run_lts(
    instance: Instance,
    cfg: StopConfig,
    schedule: LazySchedule | None = None,
    mode: str = "noavg",
    seed: int = 0,
    opt_tol: float = 1e-4,
    opt_max_iter: int = 5_000,
    max_rounds: int = constants.MAX_ROUNDS,
    fixed_allocation: Allocation | None = None,
    algorithm: str | None = None,
    on_round=None,
) -> RunRecord:
    """Run one trial to completion (or the safety cap) and report the outcome.

    With fixed_allocation the target allocation is never re-optimized; this is
    how the oracle and static baselines reuse the sampling and stopping rules.
    """
    if instance.arm_set.kind != "finite":
        raise InvalidInputError("run_lts needs a finite instance")
    if schedule is None:
        schedule = LazySchedule()
    arms = instance.arm_set
    design = DesignState(arms.dim, arms.n_arms)
    tracker = TrackerState(arms, mode=mode, allocation=fixed_allocation)
    stream = RewardStream(instance, seed)
    optimizer = lambda mu, a, warm_start: optimize_allocation(
        mu, a, warm_start=warm_start, tol=opt_tol, max_iter=opt_max_iter
    )

    start = time.perf_counter()
    incomplete = False
    while True:
        if should_stop(design, cfg, arms):
            break
        if design.t >= max_rounds:
            incomplete = True
            break
        idx = next_arm(tracker, design)
        reward = stream.sample_reward(arms.arms[idx])
        design.update(arms.arms[idx], idx, reward)
        if fixed_allocation is None:
            maybe_update_allocation(tracker, schedule, design, optimizer)
        else:
            tracker.w_cumsum += tracker.allocation.weights
        if on_round is not None:
            on_round(design, tracker)
    elapsed = time.perf_counter() - start

    a_hat = empirical_best_arm(design, arms)
    support = tracker.allocation.support_size if tracker.allocation is not None else 0
    return RunRecord(
        algorithm=algorithm or f"lts-{mode}",
        instance=instance.name,
        seed=seed,
        tau=design.t,
        answer=a_hat,
        correct=bool(a_hat == instance.best_arm_index),
        support_size=support,
        wall_time_s=elapsed,
        incomplete=incomplete,
    )
