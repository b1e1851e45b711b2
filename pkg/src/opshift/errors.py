"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class DomainError(ValueError):
    """Raised when a function is evaluated where it is undefined
    (e.g. a pole sitting on an operator spectrum)."""


class NumericError(RuntimeError):
    """Raised when a numerical kernel fails to converge."""


class BudgetError(ValidationError):
    """Raised when a computation would exceed the configured size budget."""
