"""Asymptotic fit reports."""

from typing import Literal

from pydantic import Field

from .base import BaseReport
from .geometry import MetricTag

BasisTerm = float | Literal["log"]


class ExpansionFit(BaseReport):
    """Least-squares fit of value(eps) = sum_j c_j eps^p_j over a ladder."""

    exponents: list[BasisTerm]
    coefficients: list[float]
    finite_part: float
    residual: float
    cond: float
    ladder: list[tuple[float, float]]
    chart: str | None = None
    quantity: str | None = None
    metric_tag: MetricTag | None = None

    def coefficient(self, term: BasisTerm) -> float:
        """Fitted coefficient of one basis term (0.0 if the term is not in the basis)."""
        for exponent, value in zip(self.exponents, self.coefficients, strict=True):
            if exponent == term:
                return value
        return 0.0


class BFormExpansion(BaseReport):
    """|B°|^2 along a ray toward the ideal boundary: b_2 r^2 + b_3 r^3 + b_4 r^4 + ..."""

    chart: str
    ray: list[float]
    b2: float
    b3: float
    b4: float
    b2_oracle: float
    b2_error: float
    b3_bound: float
    passed: bool = Field(alias="pass")
    fit: ExpansionFit


class LaplacianCorrectionReport(BaseReport):
    """Finite parts of int 2|B°|^2 and int (2|B°|^2 + Delta |B°|^2), plus the flux ladder."""

    chart: str
    plain: ExpansionFit
    corrected: ExpansionFit
    flux: ExpansionFit
    finite_part_gap: float
    corrected_divergence: float
    flux_constant: float
    passed: bool = Field(alias="pass")


class ConstantTermCheck(BaseReport):
    """Whether a ladder's fitted eps^0 coefficient vanishes."""

    constant: float
    scale: float
    tolerance: float
    passed: bool = Field(alias="pass")
    fit: ExpansionFit


class BasisHonestyReport(BaseReport):
    """Effect of diagnostic basis terms on the finite part."""

    base: ExpansionFit
    extended: ExpansionFit
    extra_terms: dict[str, float]
    finite_part_shift: float
    passed: bool = Field(alias="pass")
