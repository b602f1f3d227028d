"""Exception types shared across the toolkit."""


class CasimirKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CasimirKitError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class CapabilityError(CasimirKitError, NotImplementedError):
    """The requested combination of body and method is not supported."""


class FitError(CasimirKitError, ArithmeticError):
    """A least-squares fit or convergence check failed.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (condition number, residual, rank) so callers can report it.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
