"""User-friendly error messages and handling."""

from enum import Enum
from typing import Optional

from utils.errors import (
    BoundViolationError,
    ClassificationError,
    ConfigError,
    NoSignChangeError,
    NumericalError,
    SweepCellError,
    ToolkitError,
)


class UserFriendlyError(Enum):
    """User-friendly error messages with solutions."""

    CONFIG_INVALID = {
        "title": "❌ Invalid Configuration",
        "description": "A parameter, axis or run-file value is out of range",
        "solution": "Check the command-line flags and the --config file",
        "severity": "ERROR",
        "exit_code": 2,
    }

    SWEEP_CELL_FAILED = {
        "title": "❌ Sweep Cell Failed",
        "description": "A phase-diagram cell could not be evaluated",
        "solution": "Narrow the grid around the reported (T, B) cell or lower --sites",
        "severity": "ERROR",
        "exit_code": 3,
    }

    NUMERICAL_FAILURE = {
        "title": "❌ Numerical Failure",
        "description": "An eigensolver, Gibbs weight or quadrature produced an invalid result",
        "solution": "Avoid extreme temperatures and check the log file for the failing step",
        "severity": "ERROR",
        "exit_code": 3,
    }

    NO_SIGN_CHANGE = {
        "title": "❌ No Crossing In Bracket",
        "description": "The witness margin has the same sign at both ends of the bracket",
        "solution": "Widen --t-lo/--t-hi so the margin changes sign",
        "severity": "ERROR",
        "exit_code": 3,
    }

    AMBIGUOUS_FIT = {
        "title": "❌ Ambiguous Classification",
        "description": "Competing fits explain the data equally well",
        "solution": "Use a longer window or a smaller cutoff (--epsilon)",
        "severity": "ERROR",
        "exit_code": 3,
    }

    BOUND_VIOLATED = {
        "title": "❌ Separable Bound Violated",
        "description": "A product state exceeds the claimed separable bound",
        "solution": "The bound is wrong for this model; report the run with its seed",
        "severity": "CRITICAL",
        "exit_code": 1,
    }

    FILE_ERROR = {
        "title": "❌ Output Not Written",
        "description": "The output file could not be written",
        "solution": "Check directory path permissions and try again",
        "severity": "ERROR",
        "exit_code": 2,
    }

    UNKNOWN_ERROR = {
        "title": "❌ Unknown Error",
        "description": "An unexpected error occurred",
        "solution": "Check the logs for details or report the issue",
        "severity": "ERROR",
        "exit_code": 3,
    }

    def format_message(self, detail: Optional[str] = None) -> str:
        """
        Format error message for user display.

        Parameters
        ----------
        detail : Optional[str]
            Exception message appended below the description.

        Returns
        -------
        str
            Formatted error message
        """
        info = self.value
        text = f"\n{info['title']}\n   📝 {info['description']}\n"
        if detail:
            text += f"   🔎 {detail}\n"
        return text + f"   💡 Solution: {info['solution']}\n"

    def get_severity(self) -> str:
        """Get error severity level."""
        return self.value.get("severity", "ERROR")

    @property
    def exit_code(self) -> int:
        return self.value["exit_code"]

    @classmethod
    def from_exception(cls, exception: BaseException) -> "UserFriendlyError":
        """
        Map exception type to user-friendly error.

        Parameters
        ----------
        exception : BaseException
            Python exception instance

        Returns
        -------
        UserFriendlyError
            Corresponding user-friendly error
        """
        # Subclasses first.
        mapping = (
            (SweepCellError, cls.SWEEP_CELL_FAILED),
            (NoSignChangeError, cls.NO_SIGN_CHANGE),
            (ClassificationError, cls.AMBIGUOUS_FIT),
            (BoundViolationError, cls.BOUND_VIOLATED),
            (ConfigError, cls.CONFIG_INVALID),
            (NumericalError, cls.NUMERICAL_FAILURE),
            (OSError, cls.FILE_ERROR),
            (ValueError, cls.CONFIG_INVALID),
            (ArithmeticError, cls.NUMERICAL_FAILURE),
        )
        for exception_type, user_error in mapping:
            if isinstance(exception, exception_type):
                return user_error
        return cls.UNKNOWN_ERROR


class ErrorHandler:
    """Handle errors with user-friendly messages."""

    def __init__(self):
        """Initialize error handler."""
        self.error_count = 0
        self.warnings_count = 0

    def handle_error(self, exception: BaseException, logger=None) -> int:
        """
        Log a user-friendly message for ``exception`` and return its exit code.

        Parameters
        ----------
        exception : BaseException
            The exception that occurred
        logger : logging.Logger
            Logger instance for output

        Returns
        -------
        int
            Process exit code for the failure.
        """
        user_error = UserFriendlyError.from_exception(exception)
        exit_code = user_error.exit_code
        if isinstance(exception, ToolkitError):
            exit_code = exception.exit_code

        if logger:
            detail = str(exception)
            if user_error.get_severity() in ("ERROR", "CRITICAL"):
                logger.error(user_error.format_message(detail))
                self.error_count += 1
            else:
                logger.warning(user_error.format_message(detail))
                self.warnings_count += 1

            logger.debug(
                "Original exception: %s: %s", type(exception).__name__, exception, exc_info=True
            )
        return exit_code

    def warn(self, message: str, logger=None) -> None:
        """Count and log a recoverable condition."""
        self.warnings_count += 1
        if logger:
            logger.warning(message)

    def get_summary(self) -> str:
        """
        Get error summary for reporting.

        Returns
        -------
        str
            Summary of errors and warnings
        """
        if self.error_count == 0 and self.warnings_count == 0:
            return "✅ No errors or warnings"

        parts = []
        if self.error_count > 0:
            parts.append(f"❌ {self.error_count} error{'s' if self.error_count != 1 else ''}")
        if self.warnings_count > 0:
            parts.append(f"⚠️ {self.warnings_count} warning{'s' if self.warnings_count != 1 else ''}")

        return ", ".join(parts)
