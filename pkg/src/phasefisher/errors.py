"""Exception types shared across the package."""


class PhaseFisherError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(PhaseFisherError):
    pass


class InvalidArgumentError(PhaseFisherError, ValueError):
    pass


class InvalidStateError(PhaseFisherError):
    pass


class InvalidDistributionError(PhaseFisherError):
    pass


class TruncationError(PhaseFisherError):
    """Raised when probability leaks into the top Fock levels beyond tolerance."""

    def __init__(self, message, tail_mass=None):
        super().__init__(message)
        self.tail_mass = tail_mass


class ResourceLimitError(PhaseFisherError):
    pass


class NumericalInstabilityError(PhaseFisherError):
    """Raised when a finite-difference estimate fails to converge.

    Carries the individual estimates so callers can inspect the spread.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class PeakUnresolvedError(PhaseFisherError):
    pass


class EstimatorUndefinedError(PhaseFisherError):
    pass


class InfeasibleError(PhaseFisherError):
    pass


class UndefinedLimitError(PhaseFisherError):
    pass


class ApproximationWarning(UserWarning):
    """Emitted when a closed form is evaluated outside its stated validity regime."""
