"""Quadrature settings and integral reports."""

from pydantic import BaseModel, ConfigDict, Field

from ..core.config import settings
from .base import BaseReport
from .geometry import MetricTag


class QuadratureSpec(BaseModel):
    """Tensor Gauss-Legendre rule with geometric panels toward the z = eps face."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rule: int = Field(default_factory=lambda: settings.quad_order, ge=2, le=256)
    profile_rule: int = Field(default_factory=lambda: settings.profile_order, ge=2, le=512)
    subdivision: int = Field(default_factory=lambda: settings.panels, ge=1, le=60)
    symmetry_factor: float | None = Field(default=None, gt=0)
    tolerance: float = Field(default=1e-9, gt=0)
    check_refinement: bool = True
    threads: int = Field(default=0, ge=0)


class IntegralReport(BaseReport):
    """One truncated integral."""

    chart: str
    quantity: str
    metric_tag: MetricTag
    eps: float | None
    value: float
    boundary: bool = False
    panels: int
    nodes: int
