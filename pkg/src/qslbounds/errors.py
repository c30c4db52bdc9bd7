"""Exception types shared across the package."""


class QslError(Exception):
    """Base class for all qslbounds errors."""


class NotHermitian(QslError):
    """Matrix fails the Hermiticity tolerance."""


class NoConvergence(QslError):
    """An iterative backend failed to converge."""


class InvalidState(QslError):
    """Density-operator invariants violated (trace, positivity, finiteness)."""


class StateInvariantViolation(QslError):
    """A propagated state left the admissible clipping window."""


class NonFiniteState(QslError):
    """Propagation produced NaN or infinity."""


class NotUnitaryBasis(QslError):
    """Measurement basis is not unitary to tolerance."""


class InvalidDistribution(QslError):
    """Probability vector is not normalized or not nonnegative."""


class EnergyBelowGroundState(QslError):
    """Requested mean energy at or below the smallest eigenvalue."""


class NoBracket(QslError):
    """Inverse-temperature bracket expansion exceeded its cap."""


class DimMismatch(QslError):
    """Operands live in different Hilbert-space dimensions."""


class LabelMismatch(QslError):
    """Marginal distributions are over different label sets."""


class AmplitudeZero(QslError):
    """Amplitude c(t) within the guard radius of zero; rates undefined."""


class EmptyTrajectory(QslError):
    """Trajectory has no usable grid points."""


class ConfigInvalid(QslError):
    """Sweep or demo configuration failed validation."""
