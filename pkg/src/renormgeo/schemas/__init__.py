"""Schemas for the renormgeo reports and configuration."""

from .base import BaseReport, ErrorReport
from .geometry import (
    BoundaryFrame,
    ConformalResiduals,
    ExtrinsicFrame,
    IntrinsicFrame,
    MetricTag,
    SurfaceSpec,
)
from .quadrature import IntegralReport, QuadratureSpec
from .renorm import (
    BasisHonestyReport,
    BasisTerm,
    BFormExpansion,
    ConstantTermCheck,
    ExpansionFit,
    LaplacianCorrectionReport,
)
from .run import RunConfig
from .verification import ConsistencyCheck, TheoremId, VerificationReport

__all__ = [
    # Base
    "BaseReport",
    "ErrorReport",
    # Geometry
    "MetricTag",
    "SurfaceSpec",
    "ExtrinsicFrame",
    "ConformalResiduals",
    "IntrinsicFrame",
    "BoundaryFrame",
    # Quadrature
    "QuadratureSpec",
    "IntegralReport",
    # Renormalization
    "BasisTerm",
    "ExpansionFit",
    "BFormExpansion",
    "LaplacianCorrectionReport",
    "ConstantTermCheck",
    "BasisHonestyReport",
    # Verification
    "TheoremId",
    "ConsistencyCheck",
    "VerificationReport",
    # CLI
    "RunConfig",
]
