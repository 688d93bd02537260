"""Exception hierarchy shared by all modules."""


class KrylovRangeError(Exception):
    """Base class for errors raised by :mod:`krylov_range`."""


class DimensionError(KrylovRangeError, ValueError):
    """Raised when array shapes are incompatible."""


class DomainError(KrylovRangeError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class SingularityError(KrylovRangeError, ArithmeticError):
    """Raised when a matrix is (numerically) singular or rank deficient."""


class PreconditionError(KrylovRangeError, ValueError):
    """Raised when inputs are valid individually but violate a stated precondition."""


class ConfigError(KrylovRangeError, ValueError):
    """Raised for invalid experiment configurations."""
