import numpy as np
import pytest

from shockloop import flux_for_level, make_controller, make_flux


@pytest.fixture(scope="session")
def burgers():
    return flux_for_level("burgers", 0.5)


@pytest.fixture(scope="session")
def cosh_flux():
    return flux_for_level("cosh", 0.2)


@pytest.fixture(scope="session")
def demo_controller(burgers):
    return make_controller(burgers, 1.0, 0.4, 0.1, 0.005, 1.2, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
