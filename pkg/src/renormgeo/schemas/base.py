"""Base schemas for common report patterns."""

from typing import Any

from pydantic import BaseModel, ConfigDict


class BaseReport(BaseModel):
    """Base report model."""

    model_config = ConfigDict(populate_by_name=True)

    success: bool = True
    message: str | None = None


class ErrorReport(BaseReport):
    """Error report model."""

    success: bool = False
    error_code: str | None = None
    details: dict[str, Any] | None = None
