"""Exception handlers for the command-line front end."""

from pydantic import ValidationError

from ..core.exceptions import RenormGeoException
from ..schemas.base import ErrorReport
from ..utils.logging import logger

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_LIBRARY_ERROR = 2
EXIT_INTERNAL_ERROR = 3


def renormgeo_exception_handler(exc: RenormGeoException) -> tuple[ErrorReport, int]:
    """Handle custom renormgeo exceptions."""
    logger.warning(f"RenormGeo Exception: {exc.message} - Details: {exc.details}")

    return (
        ErrorReport(
            message=exc.message,
            error_code=exc.__class__.__name__,
            details=exc.details,
        ),
        EXIT_LIBRARY_ERROR,
    )


def validation_exception_handler(exc: ValidationError) -> tuple[ErrorReport, int]:
    """Handle pydantic validation errors raised while reading configs."""
    logger.warning(f"Validation error: {exc.errors()}")

    return (
        ErrorReport(
            message="Invalid configuration",
            error_code="VALIDATION_ERROR",
            details={"errors": exc.errors(include_url=False)},
        ),
        EXIT_LIBRARY_ERROR,
    )


def io_exception_handler(exc: OSError) -> tuple[ErrorReport, int]:
    """Handle file-system errors."""
    logger.error(f"I/O error: {exc}")

    return (
        ErrorReport(
            message=str(exc),
            error_code="IO_ERROR",
            details={"filename": getattr(exc, "filename", None)},
        ),
        EXIT_LIBRARY_ERROR,
    )


def general_exception_handler(exc: Exception) -> tuple[ErrorReport, int]:
    """Handle unexpected exceptions."""
    logger.error(f"Unexpected error: {str(exc)}", exc_info=True)

    return (
        ErrorReport(message="Internal error", error_code="INTERNAL_ERROR"),
        EXIT_INTERNAL_ERROR,
    )


def handle_exception(exc: Exception) -> tuple[ErrorReport, int]:
    """Dispatch an exception to its handler and return (report, exit code)."""
    if isinstance(exc, RenormGeoException):
        return renormgeo_exception_handler(exc)
    if isinstance(exc, ValidationError):
        return validation_exception_handler(exc)
    if isinstance(exc, OSError):
        return io_exception_handler(exc)
    return general_exception_handler(exc)
