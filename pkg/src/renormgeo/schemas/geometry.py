"""Geometry schemas: surface specs and pointwise curvature frames."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from .base import BaseReport

MetricTag = Literal["euclidean", "hyperbolic"]


class SurfaceSpec(BaseModel):
    """JSON surface file: a builtin family or an expression chart."""

    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    builtin: str | None = None
    params: dict[str, float] = Field(default_factory=dict)

    expr: list[str] | None = None
    profile: list[str] | None = None
    symmetry: Literal["none", "revolution"] = "none"
    dom_dim: int | None = None
    domain: list[tuple[float, float]] | None = None
    reference: list[float] | None = None

    euler_char: int = 1
    orthogonal: bool = False
    asym_order: int = Field(default=0, ge=0, le=2)
    closed: bool = False


class ExtrinsicFrame(BaseReport):
    """Fundamental forms and extrinsic curvatures at one chart point, under both metrics."""

    parameters: list[float]
    point: list[float]
    z: float
    orientation: int

    g_euc: list[list[float]]
    g_hyp: list[list[float]]
    normal_euc: list[float]
    xi_z: float
    B_euc: list[list[float]]
    B_hyp: list[list[float]]

    kappas_euc: list[float]
    kappas_hyp: list[float]
    H_euc: float
    H_hyp: float
    R_euc: float
    R_hyp: float
    B2_euc: float
    B2_hyp: float
    B0sq_euc: float
    B0sq_hyp: float
    area_density_euc: float
    area_density_hyp: float


class ConformalResiduals(BaseReport):
    """Residuals of the hyperbolic/Euclidean curvature relations at one point."""

    kappa: list[float]
    H: float
    R: float
    max_abs: float


class IntrinsicFrame(BaseReport):
    """Curvature of the induced metric in an orthonormal frame."""

    metric_tag: MetricTag
    riemann: list[list[list[list[float]]]]
    ricci: list[list[float]]
    scalar: float
    lambda_: float = Field(alias="lambda")
    E2: float
    W2: float
    sigma2P: float | None = None
    gauss_residual: float
    symmetry_residual: float


class BoundaryFrame(BaseReport):
    """Second fundamental form and S-curvature of the level set z = eps inside M."""

    metric_tag: MetricTag
    L: list[list[float]]
    h: float
    ric_nu_nu: float
    mixed_term: float
    S: float | None = None
    kg: float | None = None
    line_density: float
