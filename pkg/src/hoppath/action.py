"""Physical systems, classical least actions, and elementary amplitudes.

One space dimension throughout.  An event is a point (x, t); a system is a
mass, a value of hbar, a potential (free or harmonic), and a charge
conjugation rule that fixes the antiparticle action.  The elementary
amplitude for an unobserved relocation is exp(i S / hbar) with S the least
action between the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FocalSingularityError, TemporalOrderError

__all__ = [
    "SpacetimePoint",
    "Region",
    "Free",
    "Harmonic",
    "SelfConjugate",
    "Conjugate",
    "PhysicalSystem",
    "Kind",
    "lagrangian",
    "classical_action",
    "anti_action",
    "classical_amplitude",
    "segment_action",
    "segment_amplitude",
]

FOCAL_SIN_EPS = 1e-9  # |sin(omega * dt)| below this counts as a focal time


@dataclass(frozen=True)
class SpacetimePoint:
    """A 1D event: spatial coordinate x at time t."""

    x: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.t})")


@dataclass(frozen=True)
class Region:
    """Open spacetime rectangle X x T = (x_lo, x_hi) x (t_lo, t_hi)."""

    x_lo: float
    x_hi: float
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.t_lo < self.t_hi):
            raise ValueError("region must be a non-empty open rectangle")

    def contains_closure(self, q: SpacetimePoint) -> bool:
        return self.x_lo <= q.x <= self.x_hi and self.t_lo <= q.t <= self.t_hi


@dataclass(frozen=True)
class Free:
    """No potential: V(x) = 0."""


@dataclass(frozen=True)
class Harmonic:
    """Harmonic potential V(x) = m * omega^2 * x^2 / 2."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be > 0")


@dataclass(frozen=True)
class SelfConjugate:
    """The antiparticle action equals the particle action."""


@dataclass(frozen=True)
class Conjugate:
    """Antiparticle action computed with the potential coupling rescaled.

    potential_scale = -1 flips the sign of the potential term of the
    Lagrangian; the kinetic term is untouched.
    """

    potential_scale: float = -1.0


@dataclass(frozen=True)
class PhysicalSystem:
    mass: float = 1.0
    hbar: float = 1.0
    potential: Free | Harmonic = Free()
    charge_conjugation: SelfConjugate | Conjugate = SelfConjugate()

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be > 0")
        if not self.hbar > 0:
            raise ValueError("hbar must be > 0")


class Kind(Enum):
    PARTICLE = "particle"
    ANTIPARTICLE = "antiparticle"


def lagrangian(sys: PhysicalSystem, x: float, xdot: float) -> float:
    """Kinetic minus potential energy, m*xdot^2/2 - V(x)."""
    kinetic = 0.5 * sys.mass * xdot * xdot
    if isinstance(sys.potential, Harmonic):
        return kinetic - 0.5 * sys.mass * sys.potential.omega**2 * x * x
    return kinetic


def _potential_scale(sys: PhysicalSystem, kind: Kind) -> float:
    if kind is Kind.ANTIPARTICLE and isinstance(sys.charge_conjugation, Conjugate):
        return sys.charge_conjugation.potential_scale
    return 1.0


def segment_action(sys: PhysicalSystem, x0, t0, x1, t1, kind: Kind = Kind.PARTICLE):
    """Stationary action from (x0, t0) to (x1, t1); broadcasts over arrays.

    Durations t1 - t0 must be positive elementwise; no check is performed
    here (the scalar wrappers check).  For the harmonic potential this is
    the textbook stationary-path closed form

        S = m*w * ((x0^2 + x1^2) cos(w dt) - 2 x0 x1) / (2 sin(w dt)),

    singular at focal durations w dt = k pi.  The antiparticle of a
    Conjugate system rescales the potential coupling; a negative scale
    turns the trigonometric form into the hyperbolic one.
    """
    dt = np.asarray(t1, dtype=float) - np.asarray(t0, dtype=float)
    dx = np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float)
    scale = _potential_scale(sys, kind)
    m = sys.mass
    if isinstance(sys.potential, Free) or scale == 0.0:
        return m * dx * dx / (2.0 * dt)
    omega = sys.potential.omega * math.sqrt(abs(scale))
    a = np.asarray(x0, dtype=float)
    b = np.asarray(x1, dtype=float)
    if scale > 0:
        s = np.sin(omega * dt)
        if np.any(np.abs(s) < FOCAL_SIN_EPS):
            raise FocalSingularityError(
                "harmonic action singular: omega * dt within {:g} of a focal time".format(FOCAL_SIN_EPS)
            )
        return m * omega * ((a * a + b * b) * np.cos(omega * dt) - 2.0 * a * b) / (2.0 * s)
    s = np.sinh(omega * dt)
    return m * omega * ((a * a + b * b) * np.cosh(omega * dt) - 2.0 * a * b) / (2.0 * s)


def segment_amplitude(sys: PhysicalSystem, x0, t0, x1, t1, kind: Kind = Kind.PARTICLE):
    """exp(i S / hbar) for the segment; broadcasts over arrays."""
    return np.exp(1j * segment_action(sys, x0, t0, x1, t1, kind) / sys.hbar)


def _require_forward(q: SpacetimePoint, q_next: SpacetimePoint):
    if not q_next.t > q.t:
        raise TemporalOrderError(f"require q_next.t > q.t, got {q_next.t} <= {q.t}")


def classical_action(sys: PhysicalSystem, q: SpacetimePoint, q_next: SpacetimePoint) -> float:
    """Least action S for the particle moving from q to q_next (q_next later)."""
    _require_forward(q, q_next)
    return float(segment_action(sys, q.x, q.t, q_next.x, q_next.t, Kind.PARTICLE))


def anti_action(sys: PhysicalSystem, q: SpacetimePoint, q_next: SpacetimePoint) -> float:
    """Antiparticle action for forward motion from q to q_next (q_next later).

    Equals classical_action for SelfConjugate systems.
    """
    _require_forward(q, q_next)
    return float(segment_action(sys, q.x, q.t, q_next.x, q_next.t, Kind.ANTIPARTICLE))


def classical_amplitude(
    sys: PhysicalSystem,
    q: SpacetimePoint,
    q_next: SpacetimePoint,
    kind: Kind = Kind.PARTICLE,
) -> complex:
    """exp(i S / hbar) with S the particle or antiparticle action q -> q_next."""
    _require_forward(q, q_next)
    return complex(segment_amplitude(sys, q.x, q.t, q_next.x, q_next.t, kind))
