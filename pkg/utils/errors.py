"""Custom exceptions for toolkit operations."""

from enum import Enum
from typing import Any, Dict, Optional


class ToolkitErrorType(Enum):
    """Types of toolkit errors."""

    CONFIG = "config"
    NUMERICAL = "numerical"
    BOUND_VIOLATION = "bound_violation"
    NO_SIGN_CHANGE = "no_sign_change"
    CLASSIFICATION = "classification"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        """Process exit code used by the command line for this error type."""
        return _EXIT_CODES[self]


_EXIT_CODES = {
    ToolkitErrorType.CONFIG: 2,
    ToolkitErrorType.NUMERICAL: 3,
    ToolkitErrorType.BOUND_VIOLATION: 1,
    ToolkitErrorType.NO_SIGN_CHANGE: 3,
    ToolkitErrorType.CLASSIFICATION: 3,
    ToolkitErrorType.UNKNOWN: 3,
}


class ToolkitError(Exception):
    """
    Base exception for toolkit errors.

    Provides more context about the error type and where it happened.
    """

    default_type = ToolkitErrorType.UNKNOWN

    def __init__(
        self,
        message: str,
        error_type: Optional[ToolkitErrorType] = None,
        context: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize ToolkitError.

        Parameters
        ----------
        message: str
            Human-readable error message.
        error_type: Optional[ToolkitErrorType]
            Type of error that occurred. Defaults to the class default.
        context: Optional[Dict[str, Any]]
            Extra values describing where the failure happened.
        """
        self.message = message
        self.error_type = error_type or self.default_type
        self.context = dict(context or {})
        super().__init__(self.message)

    @property
    def exit_code(self) -> int:
        return self.error_type.exit_code


class ConfigError(ToolkitError, ValueError):
    """Invalid input, parameter or precondition violation."""

    default_type = ToolkitErrorType.CONFIG


class NumericalError(ToolkitError, ArithmeticError):
    """A numerical routine failed or produced an invalid result."""

    default_type = ToolkitErrorType.NUMERICAL


class BoundViolationError(ToolkitError):
    """A claimed separable bound was exceeded by a product state."""

    default_type = ToolkitErrorType.BOUND_VIOLATION


class ClassificationError(ToolkitError):
    """A fit-based classification could not pick a class unambiguously."""

    default_type = ToolkitErrorType.CLASSIFICATION


class NoSignChangeError(ToolkitError):
    """A bisection bracket holds no sign change of the witness margin."""

    default_type = ToolkitErrorType.NO_SIGN_CHANGE

    def __init__(self, message: str, entangled_throughout: bool, **kwargs: Any):
        """
        Initialize NoSignChangeError.

        Parameters
        ----------
        message: str
            Human-readable error message.
        entangled_throughout: bool
            True when the margin is positive on both ends of the bracket
            (always entangled in range), False when it never turns positive.
        """
        self.entangled_throughout = entangled_throughout
        super().__init__(message, **kwargs)


class SweepCellError(NumericalError):
    """A phase-diagram cell failed; carries its coordinates."""

    def __init__(self, message: str, temperature: float, field: float):
        self.temperature = temperature
        self.field = field
        super().__init__(
            f"{message} (cell T={temperature:g}, B={field:g})",
            context={"temperature": temperature, "field": field},
        )
