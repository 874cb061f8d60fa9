"""Exception types shared across the package."""


class FracstepError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FracstepError, ValueError):
    """A mathematical precondition was violated (bad order, exponent, grid...)."""


class NestingError(DomainError):
    """Two meshes/grids that must be nested are not."""


class QuadratureError(FracstepError):
    """The quadrature oracle did not converge within its node budget."""


class SolverError(FracstepError):
    """A time step produced an unacceptable linear-solve residual."""


class BudgetError(FracstepError):
    """A sweep plan exceeds the configured resource budget."""
