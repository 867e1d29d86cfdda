"""Exception types raised across the package."""


class NetGramianError(Exception):
    """Base class for all package errors."""


class StructuralError(NetGramianError):
    """The matrix lacks a structural property an operation requires."""


class PreconditionError(NetGramianError, ValueError):
    """An argument violates a documented precondition."""


class ConvergenceError(NetGramianError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DegenerateSpectrumError(NetGramianError):
    """The energy bound is undefined for the given second eigenvalue."""

    def __init__(self, message, sigma2):
        super().__init__(message)
        self.sigma2 = sigma2


class UncontrollableError(NetGramianError):
    """The Gramian is singular at the requested horizon."""

    def __init__(self, message, lambda_min):
        super().__init__(message)
        self.lambda_min = lambda_min


class BudgetExceededError(NetGramianError):
    """Exhaustive enumeration would exceed the allowed budget."""


class SizeError(NetGramianError):
    """Problem too large for brute-force enumeration."""
