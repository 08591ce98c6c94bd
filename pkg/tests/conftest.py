import numpy as np
import pytest
from hypothesis import strategies as st

from schlicht.classes import DiskGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def default_grid():
    return DiskGrid.default()


@pytest.fixture(scope="session")
def small_grid():
    return DiskGrid.geometric(12, 64, r_max=0.9)


def complexes(bound=1.0):
    part = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return st.builds(complex, part, part)


def coeff_lists(order, bound=1.0):
    return st.lists(complexes(bound), min_size=order + 1, max_size=order + 1)


CURVATURE_BUDGET = 15.0


def random_functional(rng, family, max_degree=8):
    """Random finite functional b_1..b_M with a bounded second derivative of G on the circle.

    |G''| <= sum |b_n| w_n (n-1)^2, so scaling that sum to CURVATURE_BUDGET keeps
    a 1e5-point sweep within 2e-9 of the true maximum.
    """
    from schlicht.families import coefficient_weights
    from schlicht.functionals import FunctionalSpec

    m = int(rng.integers(2, max_degree + 1))
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    n = np.arange(1, m + 1)
    w = coefficient_weights(family, m)[1:]
    b *= CURVATURE_BUDGET / np.sum(np.abs(b) * w * np.maximum(n - 1, 1) ** 2)
    return FunctionalSpec.finite(b)


def brute_force_max(J, family, samples=100_000):
    from schlicht.functionals import G_of_x

    theta = 2 * np.pi * np.arange(samples) / samples
    return float(np.max(np.real(G_of_x(J, family, np.exp(1j * theta)))))
