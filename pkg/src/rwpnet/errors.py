"""Exception types raised across the package."""


class DomainError(ValueError):
    """A point lies outside the domain it was queried against."""


class SingularityError(ValueError):
    """The non-singular path loss was evaluated at its pole (zero offset, zero distance)."""


class UnsupportedError(ValueError):
    """Arguments fall outside the range an evaluator was written for."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions.

    The best available estimate and its error bound are kept on the exception so
    callers can decide whether the result is still usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class GeometryError(ValueError):
    """No admissible placement exists for a requested configuration."""
