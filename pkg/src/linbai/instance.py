"""Arm sets, problem instances, benchmark instance generators, CSV persistence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .errors import InstanceParseError, InvalidInputError, InvalidInstanceError
from .rng import philox_generator, standard_normal

FINITE = "finite"
SPHERE = "sphere"

# Angular spread (standard deviation, radians) of the clustered arms in the
# many-arms benchmark family.
MANY_ARMS_PHI_STD = 0.09


@dataclass(frozen=True)
class ArmSet:
    """The action space: either K explicit vectors spanning R^d, or the unit sphere."""

    dim: int
    arms: np.ndarray  # (K, d); empty (0, d) for the sphere kind
    kind: str = FINITE
    max_norm: float = field(init=False, default=0.0)

    def __post_init__(self):
        arms = np.asarray(self.arms, dtype=float)
        object.__setattr__(self, "arms", arms)
        if self.kind not in (FINITE, SPHERE):
            raise InvalidInputError(f"unknown arm-set kind {self.kind!r}")
        if self.kind == SPHERE:
            if self.dim < 1:
                raise InvalidInstanceError("sphere arm set needs dim >= 1")
            object.__setattr__(self, "arms", np.zeros((0, self.dim)))
            object.__setattr__(self, "max_norm", 1.0)
            return
        if arms.ndim != 2 or arms.shape[1] != self.dim:
            raise InvalidInstanceError(f"arm matrix must be (K, {self.dim}), got {arms.shape}")
        if arms.shape[0] < 2:
            raise InvalidInstanceError("a finite arm set needs at least 2 arms")
        if not np.all(np.isfinite(arms)):
            raise InvalidInstanceError("arm coordinates must be finite")
        if np.linalg.matrix_rank(arms) < self.dim:
            raise InvalidInstanceError("finite arm set must span R^d (stacked arms are rank deficient)")
        object.__setattr__(self, "max_norm", float(np.max(np.linalg.norm(arms, axis=1))))

    @property
    def n_arms(self) -> int:
        return int(self.arms.shape[0])


@dataclass(frozen=True)
class Instance:
    """Ground truth for simulation: an arm set, the true parameter, the noise level."""

    arm_set: ArmSet
    mu: np.ndarray
    sigma: float = 1.0
    name: str = "instance"

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        object.__setattr__(self, "mu", mu)
        if mu.shape != (self.arm_set.dim,):
            raise InvalidInstanceError(f"mu must have shape ({self.arm_set.dim},), got {mu.shape}")
        if not np.all(np.isfinite(mu)):
            raise InvalidInstanceError("mu must be finite")
        if not (self.sigma > 0) and self.sigma != 0.0:
            raise InvalidInstanceError(f"sigma must be >= 0, got {self.sigma}")
        if self.arm_set.kind == SPHERE:
            if np.linalg.norm(mu) <= 0.0:
                raise InvalidInstanceError("sphere instances need a nonzero mu")
            return
        rewards = self.arm_set.arms @ mu
        order = np.argsort(rewards)
        if rewards[order[-1]] - rewards[order[-2]] <= constants.BEST_ARM_GAP_TOL:
            raise InvalidInstanceError("best arm is not unique (top-two gap below tolerance)")

    @property
    def best_arm_index(self) -> int:
        if self.arm_set.kind != FINITE:
            raise InvalidInputError("best_arm_index is defined for finite arm sets only")
        return int(np.argmax(self.arm_set.arms @ self.mu))

    @property
    def best_direction(self) -> np.ndarray:
        """The optimal action on the sphere: mu normalized."""
        return self.mu / np.linalg.norm(self.mu)


def gen_many_arms(n_arms: int, seed: int, sigma: float = 1.0) -> Instance:
    """The planar many-arms benchmark family.

    Two fixed arms, (1, 0) and the unit vector at angle 3*pi/4, plus a cluster
    of n_arms - 2 unit vectors at angles pi/4 + phi_i with phi_i drawn
    i.i.d. Gaussian (std MANY_ARMS_PHI_STD) from a Philox stream keyed by
    `seed`. The true parameter is (1, 0), so (1, 0) is the best arm.
    """
    if n_arms < 3:
        raise InvalidInputError(f"many-arms instance needs at least 3 arms, got {n_arms}")
    rng = philox_generator(seed)
    phi = MANY_ARMS_PHI_STD * standard_normal(rng, size=n_arms - 2)
    angles = np.pi / 4.0 + phi
    arms = np.empty((n_arms, 2))
    arms[0] = (1.0, 0.0)
    arms[1] = (math.cos(3.0 * math.pi / 4.0), math.sin(3.0 * math.pi / 4.0))
    arms[2:, 0] = np.cos(angles)
    arms[2:, 1] = np.sin(angles)
    arm_set = ArmSet(dim=2, arms=arms)
    return Instance(arm_set, np.array([1.0, 0.0]), sigma, name=f"many-arms-K{n_arms}-seed{seed}")


def gen_orthonormal_basis(dim: int) -> list[np.ndarray]:
    """Standard basis e_1 .. e_d."""
    if dim < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {dim}")
    return [np.eye(dim)[i] for i in range(dim)]


def orthonormal_instance(dim: int = 2, sigma: float = 1.0) -> Instance:
    """Finite instance on the standard basis with mu = e_1."""
    arms = np.eye(dim)
    mu = np.zeros(dim)
    mu[0] = 1.0
    return Instance(ArmSet(dim=dim, arms=arms), mu, sigma, name=f"orthonormal-d{dim}")


def sphere_instance(mu, sigma: float = 1.0, name: str | None = None) -> Instance:
    mu = np.asarray(mu, dtype=float)
    arm_set = ArmSet(dim=mu.shape[0], arms=np.zeros((0, mu.shape[0])), kind=SPHERE)
    return Instance(arm_set, mu, sigma, name=name or f"sphere-d{mu.shape[0]}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_instance(instance: Instance, path) -> None:
    """Write a finite instance as CSV (see README for the format)."""
    if instance.arm_set.kind != FINITE:
        raise InvalidInputError("only finite instances have a CSV form; sphere instances are configured by flags")
    lines = ["d,K,sigma"]
    lines.append(f"{instance.arm_set.dim},{instance.arm_set.n_arms},{_fmt(instance.sigma)}")
    for arm in instance.arm_set.arms:
        lines.append(",".join(_fmt(x) for x in arm))
    lines.append("mu," + ",".join(_fmt(x) for x in instance.mu))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path, name: str | None = None) -> Instance:
    """Read an instance CSV written by save_instance; validates on load."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].strip() != "d,K,sigma":
        raise InstanceParseError(1, "expected header 'd,K,sigma'")
    if len(raw) < 2:
        raise InstanceParseError(2, "missing dimension line")
    parts = raw[1].split(",")
    if len(parts) != 3:
        raise InstanceParseError(2, f"expected 'd,K,sigma' values, got {raw[1]!r}")
    try:
        dim, n_arms, sigma = int(parts[0]), int(parts[1]), float(parts[2])
    except ValueError as exc:
        raise InstanceParseError(2, str(exc)) from None
    arms = []
    for i in range(n_arms):
        lineno = 3 + i
        if lineno - 1 >= len(raw):
            raise InstanceParseError(lineno, "missing arm line")
        fields = raw[lineno - 1].split(",")
        if len(fields) != dim:
            raise InstanceParseError(lineno, f"expected {dim} coordinates, got {len(fields)}")
        try:
            arms.append([float(x) for x in fields])
        except ValueError as exc:
            raise InstanceParseError(lineno, str(exc)) from None
    mu_lineno = 3 + n_arms
    if mu_lineno - 1 >= len(raw):
        raise InstanceParseError(mu_lineno, "missing mu line")
    fields = raw[mu_lineno - 1].split(",")
    if fields[0] != "mu" or len(fields) != dim + 1:
        raise InstanceParseError(mu_lineno, "expected 'mu' followed by d coordinates")
    try:
        mu = [float(x) for x in fields[1:]]
    except ValueError as exc:
        raise InstanceParseError(mu_lineno, str(exc)) from None
    try:
        arm_set = ArmSet(dim=dim, arms=np.array(arms))
        return Instance(arm_set, np.array(mu), sigma, name=name or "loaded")
    except InvalidInstanceError:
        raise
