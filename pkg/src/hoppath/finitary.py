"""Hop actions, hop amplitudes, path amplitudes, and the solved psi_n.

A hop relocates the particle directly between two events with no
intervening motion.  Its action is the classical action plus the constant
zero-point action rho * hbar; the corresponding amplitude carries the unit
phase sigma = exp(i rho).  Backward hops are forward hops of the
antiparticle, null hops carry amplitude sigma, and simultaneous hops
between distinct positions are banned (amplitude 0).

The normalization factors B_n are solved per experiment from the
requirement that the n-hop amplitude psi_n reproduce the standard
correction term delta phi_n: B_0 = sigma * A_0,

    B_1 = sigma^2 * N_1 / dphi_1,      B_n = sigma * B_{n-1} * N_n / dphi_n,

where N_n is the hop-kernel integral of the (n-1)-level correction over
the region.  psi_n is then evaluated from the same integrals, so the
identity psi_n = dphi_n is the defining property of the solved table.  The
solved B_n manifestly depend on the experiment endpoints; the table
records that context and refuses to be applied elsewhere.

In the bidirectional model the time integral splits at t_I and t_F into
three parts: before t_I the inner (n-1)-hop amplitude is the antiparticle
correction toward q_I, after t_F the final hop is an antiparticle hop from
q_F, and the middle part coincides with the unidirectional integrand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .action import Kind, PhysicalSystem, Region, SpacetimePoint, segment_amplitude
from .errors import (
    ContextMismatchError,
    DegenerateCorrectionError,
    NoActionError,
    RegionError,
    TemporalOrderError,
)
from .quadrature import QuadratureSpec, integrate_2d
from .standard import (
    normalization_A,
    phi_n,
    phi_profile_final,
    phi_profile_initial,
)
from .action import anti_action, classical_action

__all__ = [
    "PhaseParam",
    "Model",
    "HopPath",
    "ExperimentContext",
    "NormalizationTableB",
    "hop_action",
    "hop_amplitude",
    "path_amplitude",
    "solve_B_unidirectional",
    "solve_B_bidirectional",
    "psi_n",
    "psi_total",
    "TailReport",
]

DEGENERATE_RATIO = 1e-10  # |dphi_n| below this times |phi_0| is unsolvable


@dataclass(frozen=True)
class PhaseParam:
    """Zero-point phase: rho is the source of truth, sigma = exp(i rho)."""

    rho: float = 0.0

    @property
    def sigma(self) -> complex:
        return cmath.exp(1j * self.rho)


class Model(Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class HopPath:
    """Finite hop trajectory q_0 -> q_1 -> ... -> q_{k}; model tags the
    time rule.  Paths violating the unidirectional time order are
    representable; their amplitude is 0."""

    points: tuple[SpacetimePoint, ...]
    model: Model = Model.UNIDIRECTIONAL

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a path needs at least two points")

    @property
    def hops(self) -> int:
        return len(self.points) - 1

    def is_time_ordered(self) -> bool:
        return all(b.t > a.t for a, b in zip(self.points, self.points[1:]))


def hop_action(sys: PhysicalSystem, phase: PhaseParam, q: SpacetimePoint, q_next: SpacetimePoint) -> float:
    """rho*hbar plus the classical action of the hop (anti action if backward).

    Raises NoActionError for a simultaneous hop between distinct positions:
    that hop has amplitude 0 and no finite action.
    """
    zero_point = phase.rho * sys.hbar
    if q_next.t > q.t:
        return zero_point + classical_action(sys, q, q_next)
    if q_next.t < q.t:
        # backward hop: the antiparticle moves forward from q_next to q
        return zero_point + anti_action(sys, q_next, q)
    if q_next.x == q.x:
        return zero_point
    raise NoActionError("simultaneous hop between distinct positions has no finite action")


def hop_amplitude(
    sys: PhysicalSystem,
    phase: PhaseParam,
    q: SpacetimePoint,
    q_next: SpacetimePoint,
    model: Model = Model.BIDIRECTIONAL,
) -> complex:
    """Amplitude of the hop q -> q_next under the given time model.

    Total on all inputs: banned hops return 0 rather than raising.  In the
    unidirectional model every non-future hop is banned.
    """
    sigma = phase.sigma
    if q_next.t > q.t:
        return sigma * complex(segment_amplitude(sys, q.x, q.t, q_next.x, q_next.t, Kind.PARTICLE))
    if model is Model.UNIDIRECTIONAL:
        return 0j
    if q_next.t < q.t:
        return sigma * complex(segment_amplitude(sys, q_next.x, q_next.t, q.x, q.t, Kind.ANTIPARTICLE))
    if q_next.x == q.x:
        return sigma
    return 0j


def path_amplitude(sys: PhysicalSystem, phase: PhaseParam, path: HopPath) -> complex:
    """Product of hop amplitudes along the path; 0 if any hop is banned."""
    total = 1 + 0j
    for a, b in zip(path.points, path.points[1:]):
        total *= hop_amplitude(sys, phase, a, b, path.model)
        if total == 0:
            return 0j
    return total


@dataclass(frozen=True)
class ExperimentContext:
    """Identifies the experiment a normalization table was solved for."""

    system: PhysicalSystem
    region: Region
    q_i: SpacetimePoint
    q_f: SpacetimePoint
    model: Model
    rho: float
    spec: QuadratureSpec


@dataclass(frozen=True)
class NormalizationTableB:
    """Solved B_0 .. B_n for one experiment context."""

    values: tuple[complex, ...]
    context: ExperimentContext

    def __post_init__(self):
        if not self.values:
            raise ValueError("table must hold at least B_0")
        for n, v in enumerate(self.values):
            if v == 0 or not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"B_{n} must be finite and non-zero, got {v}")
        ctx = self.context
        duration = ctx.q_f.t - ctx.q_i.t
        b0_expected = cmath.exp(1j * ctx.rho) * normalization_A(ctx.system, 0, duration)
        if abs(self.values[0] - b0_expected) > 1e-12 * abs(b0_expected):
            raise ValueError("B_0 must equal sigma * A_0")

    @property
    def n_max(self) -> int:
        return len(self.values) - 1


def _check_context(table: NormalizationTableB, ctx: ExperimentContext):
    if table.context != ctx:
        raise ContextMismatchError(
            "normalization table was solved for a different experiment context"
        )


def _delta_profile_final(sys, region, qI, xs, t, n, spec, kind=Kind.PARTICLE):
    """delta phi_n((x, t), qI) over an array of x; phi_0 profile for n = 0."""
    hi = phi_profile_final(sys, region, qI, xs, t, n, spec, kind)
    if n == 0:
        return hi
    lo = phi_profile_final(sys, region, qI, xs, t, n - 1, spec, kind)
    return hi - lo


def _delta_profile_initial(sys, region, qF, xs, t, n, spec, kind=Kind.ANTIPARTICLE):
    """Anti correction delta phi-bar_n(qF, (x, t)) over an array of x."""
    hi = phi_profile_initial(sys, region, qF, xs, t, n, spec, kind)
    if n == 0:
        return hi
    lo = phi_profile_initial(sys, region, qF, xs, t, n - 1, spec, kind)
    return hi - lo


def _integrate_part(region, spec, t_lo, t_hi, column):
    """2D integral over X x (t_lo, t_hi) of a per-time-column integrand."""
    if not t_lo < t_hi:
        return 0j

    def f(X, T):
        xs = X[:, 0]
        ts = T[0, :]
        out = np.empty((xs.size, ts.size), dtype=complex)
        for j, t in enumerate(ts):
            out[:, j] = column(xs, float(t))
        return out

    rect = Region(region.x_lo, region.x_hi, t_lo, t_hi)
    return integrate_2d(f, rect, spec)


def _numerator(sys, region, qI, qF, n, spec, model) -> complex:
    """The B_n integral with all sigma factors stripped.

    For n = 1 the inner factor is the bare kernel from q_I (the paper's
    psi_0 with its B_0 cancelled); for n >= 2 it is the (n-1)-level
    correction at the integration point.  Bidirectional adds the left and
    right time margins.  Note the left margin's anti correction has its
    arguments in (later, earlier) order while the right margin keeps the
    particle correction and flips the final hop; the asymmetry follows the
    solved display and is intentional.
    """

    def mid_column(xs, t):
        final = segment_amplitude(sys, xs, t, qF.x, qF.t, Kind.PARTICLE)
        if n == 1:
            inner = segment_amplitude(sys, qI.x, qI.t, xs, t, Kind.PARTICLE)
        else:
            inner = _delta_profile_final(sys, region, qI, xs, t, n - 1, spec, Kind.PARTICLE)
        return final * inner

    total = _integrate_part(region, spec, qI.t, qF.t, mid_column)

    if model is Model.UNIDIRECTIONAL:
        return total

    def left_column(xs, t):
        # t < t_I: the hop q_I -> q is backward, so the inner amplitude is
        # the antiparticle one toward q_I; the final hop q -> q_F is forward
        final = segment_amplitude(sys, xs, t, qF.x, qF.t, Kind.PARTICLE)
        if n == 1:
            inner = segment_amplitude(sys, xs, t, qI.x, qI.t, Kind.ANTIPARTICLE)
        else:
            inner = _delta_profile_initial(sys, region, qI, xs, t, n - 1, spec, Kind.ANTIPARTICLE)
        return final * inner

    def right_column(xs, t):
        # t > t_F: the final hop q -> q_F is backward (antiparticle from
        # q_F), the inner amplitude stays the particle correction from q_I
        final = segment_amplitude(sys, qF.x, qF.t, xs, t, Kind.ANTIPARTICLE)
        if n == 1:
            inner = segment_amplitude(sys, qI.x, qI.t, xs, t, Kind.PARTICLE)
        else:
            inner = _delta_profile_final(sys, region, qI, xs, t, n - 1, spec, Kind.PARTICLE)
        return final * inner

    total += _integrate_part(region, spec, region.t_lo, qI.t, left_column)
    total += _integrate_part(region, spec, qF.t, region.t_hi, right_column)
    return total


def _solve_B(sys, region, qI, qF, n_max, phase, spec, model) -> NormalizationTableB:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not qF.t > qI.t:
        raise TemporalOrderError(f"require qF.t > qI.t, got {qF.t} <= {qI.t}")
    for q in (qI, qF):
        if not region.contains_closure(q):
            raise RegionError(f"endpoint ({q.x}, {q.t}) outside the closure of the region")
    sigma = phase.sigma
    duration = qF.t - qI.t
    values = [sigma * normalization_A(sys, 0, duration)]
    phi0 = phi_n(sys, region, qI, qF, 0, spec)
    for n in range(1, n_max + 1):
        dphi = phi_n(sys, region, qI, qF, n, spec) - phi_n(sys, region, qI, qF, n - 1, spec)
        if abs(dphi) < DEGENERATE_RATIO * abs(phi0):
            raise DegenerateCorrectionError(
                f"|delta phi_{n}| = {abs(dphi):.3e} is below {DEGENERATE_RATIO:g} * |phi_0|"
            )
        numer = _numerator(sys, region, qI, qF, n, spec, model)
        if n == 1:
            values.append(sigma * sigma * numer / dphi)
        else:
            values.append(sigma * values[n - 1] * numer / dphi)
    ctx = ExperimentContext(sys, region, qI, qF, model, phase.rho, spec)
    return NormalizationTableB(values=tuple(values), context=ctx)


def solve_B_unidirectional(
    sys: PhysicalSystem,
    region: Region,
    qI: SpacetimePoint,
    qF: SpacetimePoint,
    n_max: int,
    phase: PhaseParam,
    spec: QuadratureSpec,
) -> NormalizationTableB:
    """Solve B_0 .. B_n_max with hops restricted to the future."""
    return _solve_B(sys, region, qI, qF, n_max, phase, spec, Model.UNIDIRECTIONAL)


def solve_B_bidirectional(
    sys: PhysicalSystem,
    region: Region,
    qI: SpacetimePoint,
    qF: SpacetimePoint,
    n_max: int,
    phase: PhaseParam,
    spec: QuadratureSpec,
) -> NormalizationTableB:
    """Solve B_0 .. B_n_max with hops allowed both ways in time.

    The time margins of the region outside (t_I, t_F) contribute the left
    and right integrals; with degenerate margins the solver reduces to the
    unidirectional formula.
    """
    return _solve_B(sys, region, qI, qF, n_max, phase, spec, Model.BIDIRECTIONAL)


def psi_n(
    sys: PhysicalSystem,
    region: Region,
    qI: SpacetimePoint,
    qF: SpacetimePoint,
    n: int,
    table: NormalizationTableB,
    phase: PhaseParam,
    spec: QuadratureSpec,
    model: Model,
) -> complex:
    """n-hop finitary amplitude psi_n(qF, qI) under the solved table.

    psi_0 is the hop amplitude over B_0; for n >= 1 the recursion
    integrates the final hop kernel against the (n-1)-level amplitude,
    realized through the solved identity psi_{n-1} = delta phi_{n-1} at the
    integration endpoints (mutually recursive with the antiparticle branch
    in the bidirectional model).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    ctx = ExperimentContext(sys, region, qI, qF, model, phase.rho, spec)
    _check_context(table, ctx)
    if n > table.n_max:
        raise ValueError(f"table holds B_0..B_{table.n_max}, cannot evaluate psi_{n}")
    sigma = phase.sigma
    if n == 0:
        return hop_amplitude(sys, phase, qI, qF, model) / table.values[0]
    numer = _numerator(sys, region, qI, qF, n, spec, model)
    if n == 1:
        return sigma * sigma * numer / table.values[1]
    return sigma * (table.values[n - 1] / table.values[n]) * numer


@dataclass(frozen=True)
class TailReport:
    """|psi_n| for n = 1..n_max, a geometric tail bound, and a decay flag."""

    term_magnitudes: tuple[float, ...]
    tail_estimate: float
    monotone_decay: bool


def psi_total(
    sys: PhysicalSystem,
    region: Region,
    qI: SpacetimePoint,
    qF: SpacetimePoint,
    n_max: int,
    table: NormalizationTableB,
    phase: PhaseParam,
    spec: QuadratureSpec,
    model: Model,
) -> tuple[complex, TailReport]:
    """Partial sum psi_0 + ... + psi_n_max and the magnitude-decay report."""
    terms = [psi_n(sys, region, qI, qF, n, table, phase, spec, model) for n in range(n_max + 1)]
    mags = tuple(abs(t) for t in terms[1:])
    if not mags:
        tail = 0.0
    else:
        last = mags[-1]
        if last == 0.0:
            tail = 0.0
        else:
            ratio = last / mags[-2] if len(mags) >= 2 and mags[-2] > 0 else 0.5
            ratio = min(ratio, 0.99)
            tail = last * ratio / (1.0 - ratio)
    monotone = all(b <= a for a, b in zip(mags, mags[1:]))
    total = terms[0]
    for t in terms[1:]:
        total += t
    return total, TailReport(term_magnitudes=mags, tail_estimate=tail, monotone_decay=monotone)
