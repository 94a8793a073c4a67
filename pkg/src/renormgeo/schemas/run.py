"""CLI run configuration and the reports only the CLI produces."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .base import BaseReport
from .geometry import BoundaryFrame, ConformalResiduals, ExtrinsicFrame, IntrinsicFrame, MetricTag
from .quadrature import IntegralReport, QuadratureSpec
from .verification import TheoremId

Subcommand = Literal["catalog", "curvature", "integrate", "renorm", "expand", "verify", "suite"]
OutputFormat = Literal["json", "csv"]
ExpandCheck = Literal["bform", "laplacian", "s_boundary", "honesty"]


class RunConfig(BaseModel):
    """One CLI invocation; also the schema of ``--config`` JSON files."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    surface: str | None = None

    # Selectors
    quantity: str = "one"
    boundary: bool = False
    theorem: TheoremId | None = None
    metric: MetricTag = "hyperbolic"
    eps: float | None = Field(default=None, ge=0)
    point: list[float] | None = None
    check: ExpandCheck = "bform"
    force: bool = False
    with_topology: bool = False
    quick: bool = False

    # Ladder overrides
    eps0: float | None = Field(default=None, gt=0)
    ratio: float | None = Field(default=None, gt=1)
    rungs: int | None = Field(default=None, ge=3, le=40)

    # Quadrature overrides
    rule: int | None = Field(default=None, ge=2, le=256)
    profile_rule: int | None = Field(default=None, ge=2, le=512)
    subdivision: int | None = Field(default=None, ge=1, le=60)

    # Output
    output: str | None = None
    format: OutputFormat = "json"
    threads: int | None = Field(default=None, ge=0)
    log_level: str | None = None

    @field_validator("theorem", mode="before")
    @classmethod
    def upper_theorem(cls, value: object) -> object:
        return value.upper() if isinstance(value, str) else value

    def quadrature_spec(self) -> QuadratureSpec:
        overrides = {
            key: value
            for key, value in (
                ("rule", self.rule),
                ("profile_rule", self.profile_rule),
                ("subdivision", self.subdivision),
                ("threads", self.threads),
            )
            if value is not None
        }
        return QuadratureSpec(**overrides)


class IntegralLadder(BaseReport):
    """Truncated integrals of one quantity at several eps."""

    chart: str
    quantity: str
    metric_tag: MetricTag
    integrals: list[IntegralReport]


class CurvatureReport(BaseReport):
    """Pointwise extrinsic and intrinsic curvature at one chart point."""

    chart: str
    extrinsic: ExtrinsicFrame
    conformal: ConformalResiduals
    chen: float
    intrinsic: IntrinsicFrame
    boundary: BoundaryFrame | None = None


class CatalogItem(BaseModel):
    name: str
    summary: str
    params: dict[str, tuple[float, str]]


class CatalogReport(BaseReport):
    surfaces: list[CatalogItem]


class SuiteCheck(BaseModel):
    """One acceptance check of the suite."""

    name: str
    passed: bool = Field(alias="pass")
    value: float | None = None
    expected: float | None = None
    error: float | None = None
    detail: str | None = None

    model_config = ConfigDict(populate_by_name=True)


class SuiteReport(BaseReport):
    quick: bool
    checks: list[SuiteCheck]
    passed: int
    failed: int
