import numpy as np
import pytest

from hoppath.action import Harmonic, PhysicalSystem, Region, SpacetimePoint
from hoppath.harness import harmonic_config, narrow_x_free_config, wide_x_free_config
from hoppath.quadrature import QuadratureSpec


@pytest.fixture
def free_system():
    return PhysicalSystem()


@pytest.fixture
def harmonic_system():
    return PhysicalSystem(potential=Harmonic(omega=1.0))


@pytest.fixture
def narrow_config():
    return narrow_x_free_config()


@pytest.fixture
def wide_config():
    return wide_x_free_config()


@pytest.fixture
def harmonic_experiment():
    return harmonic_config()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def rel_err(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def spec16():
    return QuadratureSpec(rule_order=16, panels_x=16, panels_t=16)


@pytest.fixture
def origin():
    return SpacetimePoint(0.0, 0.0)


@pytest.fixture
def unit_region():
    return Region(-1.0, 1.0, 0.0, 1.0)
