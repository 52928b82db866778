import math

import numpy as np
import pytest

from hoppath.errors import NonFiniteIntegrandError
from hoppath.quadrature import (
    QuadratureSpec,
    composite_nodes,
    gauss_legendre_rule,
    integrate_1d,
    integrate_2d,
)
from hoppath.action import Region


def test_spec_bounds():
    with pytest.raises(ValueError):
        QuadratureSpec(rule_order=1)
    with pytest.raises(ValueError):
        QuadratureSpec(rule_order=65)
    with pytest.raises(ValueError):
        QuadratureSpec(panels_x=0)


@pytest.mark.parametrize("order", [2, 3, 5, 8, 16, 32, 64])
def test_rule_against_numpy_oracle(order):
    # independent oracle: numpy's own Gauss-Legendre nodes
    x, w = gauss_legendre_rule(order)
    xo, wo = np.polynomial.legendre.leggauss(order)
    assert np.max(np.abs(x - xo)) < 1e-14
    assert np.max(np.abs(w - wo)) < 1e-14


@pytest.mark.parametrize("order", [2, 4, 8, 16])
def test_single_panel_polynomial_exactness(order):
    # degree 2*order - 1 integrated to ~machine precision on one panel
    degree = 2 * order - 1
    spec = QuadratureSpec(rule_order=order, panels_x=1)
    value = integrate_1d(lambda x: x**degree + 0j, 0.0, 1.0, spec)
    exact = 1.0 / (degree + 1)
    assert abs(value - exact) / exact < 1e-12


def test_constant_integrand():
    spec = QuadratureSpec(rule_order=4, panels_x=3)
    assert integrate_1d(lambda x: np.ones_like(x) + 0j, 0.0, 1.0, spec) == pytest.approx(1.0)


def test_sine_closed_form():
    spec = QuadratureSpec(rule_order=12, panels_x=4)
    value = integrate_1d(lambda x: np.sin(x) + 0j, 0.0, math.pi, spec)
    assert abs(value - 2.0) < 1e-13


def test_complex_exponential_closed_form():
    # antiderivative -i e^{ix}: integral over [0,1] is sin(1) + i(1 - cos(1))
    spec = QuadratureSpec(rule_order=12, panels_x=4)
    value = integrate_1d(lambda x: np.exp(1j * x), 0.0, 1.0, spec)
    exact = math.sin(1.0) + 1j * (1.0 - math.cos(1.0))
    assert abs(value - exact) < 1e-14
    assert value == pytest.approx(0.8414709848078965 + 0.45969769413186023j)


def test_refinement_monotone_for_oscillatory():
    omega = 20.0
    exact = (np.exp(1j * omega) - 1.0) / (1j * omega)
    errors = []
    for panels in (2, 4, 8, 16, 32):
        spec = QuadratureSpec(rule_order=3, panels_x=panels)
        errors.append(abs(integrate_1d(lambda x: np.exp(1j * omega * x), 0.0, 1.0, spec) - exact))
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_determinism_bitwise():
    spec = QuadratureSpec(rule_order=16, panels_x=32)
    f = lambda x: np.exp(1j * 7.3 * x * x)
    assert integrate_1d(f, -2.0, 3.0, spec) == integrate_1d(f, -2.0, 3.0, spec)


def test_nonfinite_integrand_rejected():
    spec = QuadratureSpec(rule_order=4, panels_x=2)
    with pytest.raises(NonFiniteIntegrandError):
        integrate_1d(lambda x: 1.0 / (x - x), 0.0, 1.0, spec)


def test_bad_interval():
    spec = QuadratureSpec()
    with pytest.raises(ValueError):
        integrate_1d(lambda x: x, 1.0, 0.0, spec)


def test_panels_override_used_for_time_axis():
    spec = QuadratureSpec(rule_order=4, panels_x=1, panels_t=8)
    omega = 40.0
    exact = (np.exp(1j * omega) - 1.0) / (1j * omega)
    coarse = integrate_1d(lambda x: np.exp(1j * omega * x), 0.0, 1.0, spec)
    fine = integrate_1d(lambda x: np.exp(1j * omega * x), 0.0, 1.0, spec, panels=spec.panels_t)
    assert abs(fine - exact) < abs(coarse - exact)


def test_2d_constant_and_product():
    spec = QuadratureSpec(rule_order=6, panels_x=2, panels_t=3)
    rect = Region(0.0, 1.0, 0.0, 1.0)
    assert integrate_2d(lambda x, t: np.ones(np.broadcast(x, t).shape) + 0j, rect, spec) == pytest.approx(1.0)
    assert integrate_2d(lambda x, t: x * t + 0j, rect, spec) == pytest.approx(0.25)


def test_2d_separability_matches_iterated_1d():
    spec = QuadratureSpec(rule_order=8, panels_x=3, panels_t=5)
    rect = Region(0.0, 2.0, -1.0, 1.5)
    g = lambda x: np.exp(1j * x)
    h = lambda t: np.cos(t) + 0j
    two_d = integrate_2d(lambda x, t: g(x) * h(t), rect, spec)
    gx = integrate_1d(g, rect.x_lo, rect.x_hi, spec)
    ht = integrate_1d(h, rect.t_lo, rect.t_hi, spec, panels=spec.panels_t)
    assert abs(two_d - gx * ht) < 1e-12 * abs(gx * ht)


def test_composite_nodes_cover_interval():
    nodes, weights = composite_nodes(-1.0, 3.0, 5, 4)
    assert nodes.size == 20 and weights.size == 20
    assert np.all(nodes > -1.0) and np.all(nodes < 3.0)
    assert np.sum(weights) == pytest.approx(4.0)
