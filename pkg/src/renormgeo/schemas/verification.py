"""Verification reports for the area identities."""

from typing import Literal

from pydantic import Field

from .base import BaseReport
from .renorm import ExpansionFit

TheoremId = Literal["GB", "CGB", "PROP1", "THM2", "COR1", "THM3", "COR2"]


class ConsistencyCheck(BaseReport):
    """A secondary identity checked alongside the main one."""

    name: str
    value: float
    tolerance: float
    passed: bool = Field(alias="pass")


class VerificationReport(BaseReport):
    """Both sides of one identity, with every signed term of the right side.

    ``rhs`` is the ordered compensated sum of ``terms``; ``integrals`` holds the raw
    integral values the terms were scaled from.
    """

    theorem_id: TheoremId
    chart: str
    lhs: float
    rhs: float
    terms: dict[str, float]
    integrals: dict[str, float] = Field(default_factory=dict)
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool = Field(alias="pass")
    eps: float | None = None
    alternatives: dict[str, float] = Field(default_factory=dict)
    checks: list[ConsistencyCheck] = Field(default_factory=list)
    fit: dict[str, ExpansionFit] = Field(default_factory=dict)
