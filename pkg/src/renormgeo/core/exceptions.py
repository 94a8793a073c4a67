"""Custom exceptions for renormgeo."""

from typing import Any


class RenormGeoException(Exception):
    """Base exception class for renormgeo."""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class JetDomainError(RenormGeoException):
    """Exception raised when an elementary function is applied outside its domain."""

    pass


class ExprSyntaxError(RenormGeoException):
    """Exception raised when a surface expression cannot be parsed."""

    pass


class ChartError(RenormGeoException):
    """Exception raised for invalid charts, points or surface specs."""

    pass


class RankDeficiencyError(RenormGeoException):
    """Exception raised when a chart differential or metric degenerates."""

    pass


class QuadratureError(RenormGeoException):
    """Exception raised when an integral diverges or fails to converge."""

    pass


class FitError(RenormGeoException):
    """Exception raised when an asymptotic fit is ill-conditioned or inaccurate."""

    pass


class VerificationError(RenormGeoException):
    """Exception raised when an identity check or a precondition fails."""

    pass


class ConfigError(RenormGeoException):
    """Exception raised for invalid run configuration."""

    pass
