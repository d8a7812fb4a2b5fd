"""Exception types shared across the package."""


class FreudApproxError(Exception):
    """Base class for all package errors."""


class InvalidArgument(FreudApproxError, ValueError):
    """An argument violates a documented precondition."""


class ConvergenceFailure(FreudApproxError, RuntimeError):
    """A refinement loop did not stabilize.

    ``previous`` and ``last`` hold the two most recent iterates so callers
    can inspect how far apart they were.
    """

    def __init__(self, message, previous=None, last=None):
        super().__init__(message)
        self.previous = previous
        self.last = last


class InvalidFunction(FreudApproxError, ValueError):
    """A user function produced NaN or infinite values on quadrature nodes."""


class InternalError(FreudApproxError, RuntimeError):
    """An iteration limit inside a numerical kernel was exceeded."""
