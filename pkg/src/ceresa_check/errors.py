"""Exception hierarchy shared by every module."""


class CeresaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CeresaError, ValueError):
    """An argument lies outside the domain of a function."""


class NonConvergentError(CeresaError, ValueError):
    """A hypergeometric series at unit argument has non-positive excess."""


class BudgetExceededError(CeresaError, ArithmeticError):
    """The requested accuracy was not reached within the term/precision budget.

    ``best`` holds the most accurate estimate obtained, if any.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class QuadratureError(CeresaError, ArithmeticError):
    """Quadrature did not converge; ``achieved`` is the last error estimate."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class AssumptionError(CeresaError, ValueError):
    """An index triple does not satisfy the vanishing-correction assumption."""


class NotPrimeError(DomainError):
    """A prime modulus was required."""


class CrossCheckError(CeresaError, ArithmeticError):
    """Closed form and quadrature oracle disagree beyond their error bounds."""
