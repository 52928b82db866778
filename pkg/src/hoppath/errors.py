"""Exception types shared across the package."""


class HoppathError(Exception):
    """Base class for all package errors."""


class ConfigError(HoppathError):
    """Invalid experiment configuration, config file, or CLI arguments."""


class NumericalError(HoppathError):
    """Base class for errors raised when a computation is mathematically
    ill-posed or divergent for the given inputs."""


class TemporalOrderError(HoppathError):
    """The destination event does not lie in the required time order."""


class RegionError(HoppathError):
    """An endpoint lies outside the closure of the spacetime region."""


class FocalSingularityError(NumericalError):
    """Harmonic stationary action is singular: the slice duration sits on a
    focal time (sin of omega * dt vanishes) and the extremal path is not
    unique."""


class UnsupportedSystemError(HoppathError):
    """The operation has a closed form only for a different potential."""


class NoActionError(HoppathError):
    """The hop has amplitude 0 and no finite action (simultaneous hop
    between distinct spatial points)."""


class NonFiniteIntegrandError(NumericalError):
    """The integrand returned NaN or infinity at a quadrature node."""


class DegenerateCorrectionError(NumericalError):
    """A correction term is too close to zero to divide by when solving
    normalization factors."""


class ContextMismatchError(HoppathError):
    """A normalization table was solved for a different experiment than the
    one it is being applied to."""


class UnknownSymbolError(HoppathError):
    """A word contains a symbol outside the machine's alphabet."""


class UnboundedLanguageError(HoppathError):
    """The machine accepts infinitely many words and no length bound was
    supplied."""


class DivergentBehaviorError(NumericalError):
    """The infinite walk sum of the machine does not converge."""


class SubsetBlowupError(NumericalError):
    """The inclusion-exclusion subset enumeration exceeds the configured
    size cap."""
