"""Exception hierarchy shared across the package."""


class RydqcError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RydqcError, ValueError):
    """Unknown species, missing quantum-defect entry, malformed data file."""


class DomainError(RydqcError, ValueError):
    """Input outside the mathematical domain of an operation."""


class IntegrationError(RydqcError, ArithmeticError):
    """Radial integration failed (normalization or node-count check)."""


class NumericalError(RydqcError, ArithmeticError):
    """Eigensolver or fit failure; carries the offending parameter when known."""

    def __init__(self, message: str, value: float | None = None):
        super().__init__(message)
        self.value = value


class AccuracyWarning(UserWarning):
    """A result is available but its estimated truncation error is large."""
