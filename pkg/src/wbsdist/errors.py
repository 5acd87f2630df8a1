"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OverflowSignal(OverflowError):
    """A result's magnitude exceeds the representable floating-point range."""


class NonConvergenceError(ArithmeticError):
    """A truncated series or adaptive quadrature failed its accuracy test.

    Raised instead of returning a value that the convergence diagnostics
    could not certify.
    """


class DataError(ValueError):
    """Observed data violates the requirements of an operation."""
