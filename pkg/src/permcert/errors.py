"""Exception hierarchy shared by all modules."""


class PermcertError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(PermcertError, ValueError):
    """Matrix or vector shapes are incompatible."""


class DomainError(PermcertError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class NumericError(PermcertError, ArithmeticError):
    """An iterative numerical routine failed or hit a degenerate state."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SizeError(PermcertError, ValueError):
    """Problem size exceeds an enforced cap."""


class ParseError(PermcertError, ValueError):
    """Malformed serialized input."""
