"""Deterministic composite Gauss-Legendre quadrature for complex integrands.

Integrands are expected to accept numpy arrays and evaluate elementwise
(standard numpy broadcasting); every formula-style lambda such as
``lambda x: np.exp(1j * x)`` qualifies.  Results are deterministic for a
fixed spec: node sets are cached per rule order and the final accumulation
is a fixed-order pairwise tree over panel sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteIntegrandError

__all__ = [
    "QuadratureSpec",
    "gauss_legendre_rule",
    "composite_nodes",
    "integrate_1d",
    "integrate_2d",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite rule parameters: nodes per panel and panel counts per axis."""

    rule_order: int = 16
    panels_x: int = 8
    panels_t: int = 8

    def __post_init__(self):
        if not (2 <= self.rule_order <= 64):
            raise ValueError(f"rule_order must be in [2, 64], got {self.rule_order}")
        if self.panels_x < 1 or self.panels_t < 1:
            raise ValueError("panel counts must be >= 1")


_RULE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _legendre_value_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    # derivative from P_n and P_{n-1}
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1].

    Computed by Newton iteration on the Legendre polynomial from the
    Chebyshev-like initial guess, converged to 1e-15, and cached.
    """
    if order in _RULE_CACHE:
        return _RULE_CACHE[order]
    if order < 1:
        raise ValueError("order must be >= 1")
    k = np.arange(1, order + 1, dtype=float)
    x = np.cos(np.pi * (4 * k - 1) / (4 * order + 2))
    for _ in range(100):
        p, dp = _legendre_value_and_derivative(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    x = np.sort(x)
    _, dp = _legendre_value_and_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    _RULE_CACHE[order] = (x, w)
    return x, w


def composite_nodes(a: float, b: float, order: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Flattened nodes and weights of the composite rule on [a, b]."""
    xs, ws = gauss_legendre_rule(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
    weights = (half[:, None] * ws[None, :]).ravel()
    return nodes, weights


def _pairwise_sum(terms: list[complex]) -> complex:
    """Fixed-order pairwise tree reduction (deterministic for a fixed list)."""
    if not terms:
        return 0j
    vals = list(terms)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _check_finite(values: np.ndarray):
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrandError("integrand returned NaN or infinity at a quadrature node")


def integrate_1d(f, a: float, b: float, spec: QuadratureSpec, panels: int | None = None) -> complex:
    """Composite Gauss-Legendre estimate of the integral of f over [a, b].

    ``panels`` overrides ``spec.panels_x`` (callers integrating along the
    time axis pass ``spec.panels_t``).
    """
    if not a < b:
        raise ValueError(f"require a < b, got a={a}, b={b}")
    npanels = spec.panels_x if panels is None else panels
    xs, ws = gauss_legendre_rule(spec.rule_order)
    edges = np.linspace(a, b, npanels + 1)
    panel_sums = []
    for i in range(npanels):
        mid = 0.5 * (edges[i] + edges[i + 1])
        half = 0.5 * (edges[i + 1] - edges[i])
        values = np.asarray(f(mid + half * xs), dtype=complex)
        _check_finite(values)
        panel_sums.append(half * complex(np.dot(ws, values)))
    return _pairwise_sum(panel_sums)


def integrate_2d(f, rect, spec: QuadratureSpec) -> complex:
    """Tensor-product composite rule over a rectangle.

    ``rect`` is any object with x_lo, x_hi, t_lo, t_hi attributes.  ``f``
    is called as ``f(X, T)`` on 2D node grids and must broadcast.  Equals
    iterated :func:`integrate_1d` for separable integrands.
    """
    xn, xw = composite_nodes(rect.x_lo, rect.x_hi, spec.rule_order, spec.panels_x)
    tn, tw = composite_nodes(rect.t_lo, rect.t_hi, spec.rule_order, spec.panels_t)
    values = np.asarray(f(xn[:, None], tn[None, :]), dtype=complex)
    if values.shape != (xn.size, tn.size):
        values = np.broadcast_to(values, (xn.size, tn.size))
    _check_finite(values)
    order = spec.rule_order
    block_sums = []
    for ix in range(spec.panels_x):
        xsl = slice(ix * order, (ix + 1) * order)
        for it in range(spec.panels_t):
            tsl = slice(it * order, (it + 1) * order)
            block = values[xsl, tsl]
            block_sums.append(complex(xw[xsl] @ block @ tw[tsl]))
    return _pairwise_sum(block_sums)
