"""Reward simulation: r_t = mu^T a + sigma * z_t with seeded Gaussian noise."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .instance import Instance
from .rng import philox_generator, standard_normal


class RewardStream:
    """Seeded reward feedback for one run.

    The noise stream depends only on (seed); replaying the same arm sequence
    against the same seed reproduces rewards bit-for-bit. The round counter
    advances by exactly one per sample. A single run owns its stream; streams
    are never shared across workers.
    """

    def __init__(self, instance: Instance, seed: int):
        self.instance = instance
        self.seed = int(seed)
        self._rng = philox_generator(seed)
        self.t = 0

    def sample_reward(self, arm) -> float:
        arm = np.asarray(arm, dtype=float)
        if arm.shape != self.instance.mu.shape:
            raise InvalidInputError(f"arm has shape {arm.shape}, expected {self.instance.mu.shape}")
        z = float(standard_normal(self._rng))
        self.t += 1
        return float(self.instance.mu @ arm) + self.instance.sigma * z

    def noise_block(self, size: int) -> np.ndarray:
        """Draw `size` standard normals; consumes the same stream as sample_reward."""
        self.t += size
        return standard_normal(self._rng, size=size)
