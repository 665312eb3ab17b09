"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class UndefinedDirectionError(DomainError):
    """A mean direction was requested for data with zero resultant length."""


class NumericError(ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


class DataError(ValueError):
    """Input data could not be read or is structurally invalid."""
