import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from linbai import ArmSet, Instance, orthonormal_instance


@pytest.fixture
def ortho2():
    """Standard-basis instance in the plane: arms e1, e2, mu = e1, sigma = 1."""
    return orthonormal_instance(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_finite_instance(rng, n_arms, dim=2, unit=False):
    """A random spanning instance with a unique best arm."""
    while True:
        arms = rng.standard_normal((n_arms, dim))
        if unit:
            arms /= np.linalg.norm(arms, axis=1, keepdims=True)
        mu = rng.standard_normal(dim)
        try:
            return Instance(ArmSet(dim=dim, arms=arms), mu, 1.0, name="random")
        except Exception:
            continue
