"""
Shared fixtures.
"""

import numpy as np
import pytest

from app.rtbp.equilibria import refined_point
from app.rtbp.params import make_params

# Routh critical mass ratio of the classical problem
ROUTH_MU = (1.0 - np.sqrt(23.0 / 27.0)) / 2.0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def classical():
    return make_params(0.01)


@pytest.fixture
def perturbed():
    return make_params(0.01, q1=0.98, a2=2e-3, w1=1e-3)


@pytest.fixture
def classical_l4(classical):
    return refined_point(classical)


@pytest.fixture
def perturbed_l4(perturbed):
    return refined_point(perturbed)


def random_states(rng: np.random.Generator, count: int):
    """States in an annulus around the primaries, away from both."""
    x = rng.uniform(-1.5, 1.5, count)
    y = rng.uniform(0.3, 1.5, count) * rng.choice([-1.0, 1.0], count)
    vx = rng.uniform(-0.5, 0.5, count)
    vy = rng.uniform(-0.5, 0.5, count)
    return x, y, vx, vy
