"""Base service class with common functionality."""

from abc import ABC
from collections.abc import Sequence
from typing import NoReturn

from ..core.exceptions import QuadratureError, RenormGeoException
from ..schemas.quadrature import QuadratureSpec
from .renorm import default_ladder


class BaseService(ABC):
    """Base service holding the quadrature rule and the eps-ladder shared by its runs."""

    def __init__(self, spec: QuadratureSpec | None = None, ladder: Sequence[float] | None = None):
        self.spec = spec or QuadratureSpec()
        self.ladder = list(ladder or default_ladder())

    def _handle_numeric_error(self, error: Exception, operation: str) -> NoReturn:
        """Re-raise foreign numerical failures as library errors."""
        if isinstance(error, RenormGeoException):
            raise error
        raise QuadratureError(
            message=f"Numerical error during {operation}",
            details={"original_error": str(error)},
        )
