"""Verification harness: both sides of every area identity, assembled independently.

Left sides come from direct quadrature (area, curvature integrals) or from a ladder fit
(renormalized area). Right sides are assembled term by term from separately computed
integrals; every signed term is kept in the report so the right side can be re-summed.
"""

import math
from collections.abc import Sequence

from ..core.exceptions import ChartError, VerificationError
from ..schemas.geometry import MetricTag
from ..schemas.quadrature import QuadratureSpec
from ..schemas.renorm import BasisTerm, ExpansionFit
from ..schemas.verification import ConsistencyCheck, TheoremId, VerificationReport
from ..utils.logging import logger
from ..utils.numerics import ordered_sum, relative_error
from .base import BaseService
from .chart import Chart
from .extrinsic import require_declared_asymptotics
from .quadrature import integrate_boundary, integrate_many
from .renorm import default_basis, fit_expansion, limit_from_values, truncated_ladders

TOLERANCES: dict[str, float] = {
    "GB": 1e-6,
    "CGB": 1e-6,
    "PROP1": 1e-7,
    "THM2": 1e-4,
    "COR1": 1e-4,
    "THM3": 5e-4,
    "COR2": 5e-4,
}
H3_CONSISTENCY = 1e-6
H5_CONSISTENCY = 1e-5

Item = tuple[str, MetricTag]


def area_basis(n: int) -> tuple[BasisTerm, ...]:
    """Area-expansion basis used by the theorem checks (default basis plus eps^3)."""
    return (*default_basis(n), 3)


def _key(quantity: str, tag: MetricTag) -> str:
    return f"{quantity}_{'hyp' if tag == 'hyperbolic' else 'euc'}"


def _check(name: str, value: float, tolerance: float) -> ConsistencyCheck:
    passed = value <= tolerance
    return ConsistencyCheck(
        success=passed, name=name, value=value, tolerance=tolerance, passed=passed
    )


def _report(
    theorem_id: TheoremId,
    chart: Chart,
    lhs: float,
    terms: dict[str, float],
    checks: Sequence[ConsistencyCheck] = (),
    **extra: object,
) -> VerificationReport:
    rhs = ordered_sum(terms.values())
    tolerance = TOLERANCES[theorem_id]
    rel_err = relative_error(lhs, rhs)
    passed = rel_err <= tolerance and all(c.passed for c in checks)
    logger.info(
        f"{theorem_id} on {chart.name}: lhs={lhs:.12g} rhs={rhs:.12g} rel_err={rel_err:.3e} "
        f"{'pass' if passed else 'FAIL'}"
    )
    return VerificationReport(
        success=passed,
        theorem_id=theorem_id,
        chart=chart.name,
        lhs=lhs,
        rhs=rhs,
        terms=terms,
        abs_err=abs(lhs - rhs),
        rel_err=rel_err,
        tolerance=tolerance,
        passed=passed,
        checks=list(checks),
        **extra,  # type: ignore[arg-type]
    )


def _truncated_euler_char(chart: Chart, eps: float | None) -> int:
    """chi(M_eps): cutting a cap off a closed chart removes one disk."""
    if chart.closed and eps and chart.face_parameter(eps) < chart.domain[0][1]:
        return chart.euler_char - 1
    return chart.euler_char


class TheoremService(BaseService):
    """Runs the identity checks with one quadrature rule and one eps-ladder."""

    # ===== Fixed-eps identities =====

    def _integrals(self, chart: Chart, items: Sequence[Item], eps: float | None) -> dict[str, float]:
        try:
            values = integrate_many(chart, items, eps, self.spec)
        except Exception as exc:
            self._handle_numeric_error(exc, f"integration on {chart.name}")
        return {_key(q, t): v for (q, t), v in zip(items, values, strict=True)}

    def _boundary(self, chart: Chart, quantity: str, eps: float | None) -> dict[str, float]:
        return {
            _key(quantity, tag): integrate_boundary(chart, quantity, eps, tag, self.spec)
            for tag in ("hyperbolic", "euclidean")
        }

    def prop1(
        self, chart: Chart, eps: float | None, with_topology: bool = False
    ) -> VerificationReport:
        """Area of M_eps against the bending / scalar-curvature combination."""
        if not chart.closed and not (eps and eps > 0):
            raise VerificationError("the area formula needs eps > 0", details={"eps": eps})
        n = chart.n
        items: list[Item] = [("one", "hyperbolic")]
        for i in range(n):
            quantity = "H2" if n == 1 else ("H4" if i == 0 else "H2R")
            items += [(quantity, "hyperbolic"), (quantity, "euclidean")]
        scalar = "lambda" if n == 1 else "lambda2"
        items += [(scalar, "hyperbolic"), (scalar, "euclidean")]
        if n == 2:
            items.append(("lambda", "hyperbolic"))
        if with_topology and n == 2:
            items += [(q, t) for q in ("W2", "E2") for t in ("hyperbolic", "euclidean")]  # type: ignore[misc]
        vals = self._integrals(chart, items, eps)

        terms: dict[str, float] = {}
        for i in range(n):
            quantity = "H2" if n == 1 else ("H4" if i == 0 else "H2R")
            sign = (-1) ** (n + i) * math.comb(n, i)
            terms[_key(quantity, "euclidean")] = sign * vals[_key(quantity, "euclidean")]
            terms[_key(quantity, "hyperbolic")] = -sign * vals[_key(quantity, "hyperbolic")]
        terms[_key(scalar, "euclidean")] = vals[_key(scalar, "euclidean")]
        if n == 1:
            terms[_key("lambda", "hyperbolic")] = -vals[_key("lambda", "hyperbolic")]
        else:
            terms[_key("lambda", "hyperbolic")] = -2 * vals[_key("lambda", "hyperbolic")]
            terms[_key("lambda2", "hyperbolic")] = -vals[_key("lambda2", "hyperbolic")]

        alternatives: dict[str, float] = {}
        checks: list[ConsistencyCheck] = []
        if with_topology:
            chi = _truncated_euler_char(chart, eps)
            topo = dict(terms)
            if n == 1:
                kg = self._boundary(chart, "kg", eps)
                vals.update(kg)
                # Gauss-Bonnet for each metric; the chi terms cancel.
                topo[_key("lambda", "euclidean")] = 2 * math.pi * chi - kg["kg_euc"]
                topo[_key("lambda", "hyperbolic")] = -(2 * math.pi * chi - kg["kg_hyp"])
            else:
                S = self._boundary(chart, "S", eps)
                vals.update(S)
                for tag, sign in (("euclidean", 1.0), ("hyperbolic", -1.0)):
                    cgb = (
                        4 * math.pi**2 * chi / 3
                        - vals[_key("W2", tag)] / 24
                        + vals[_key("E2", tag)] / 12
                        - S[_key("S", tag)] / 3
                    )
                    topo[_key("lambda2", tag)] = sign * cgb
            alternatives["rhs_with_topology"] = ordered_sum(topo.values())
            alternatives["euler_char"] = float(chi)
            checks.append(
                _check(
                    "topology_cancellation",
                    relative_error(alternatives["rhs_with_topology"], ordered_sum(terms.values())),
                    TOLERANCES["GB"],
                )
            )

        return _report(
            "PROP1",
            chart,
            vals["one_hyp"],
            terms,
            integrals=vals,
            eps=eps,
            alternatives=alternatives,
            checks=checks,
        )

    def gauss_bonnet(
        self, chart: Chart, eps: float | None, metric_tag: MetricTag
    ) -> VerificationReport:
        """Gauss-Bonnet (surfaces) or Chern-Gauss-Bonnet (4-manifolds) on M_eps."""
        chi = _truncated_euler_char(chart, eps)
        if chart.dom_dim == 2:
            vals = self._integrals(chart, [("K", metric_tag)], eps)
            kg = integrate_boundary(chart, "kg", eps, metric_tag, self.spec)
            vals["kg"] = kg
            lhs = vals[_key("K", metric_tag)] + kg
            return _report(
                "GB", chart, lhs, {"two_pi_chi": 2 * math.pi * chi}, integrals=vals, eps=eps
            )

        items: list[Item] = [
            (q, metric_tag) for q in ("lambda2", "W2", "E2", "sigma2P")
        ]
        vals = self._integrals(chart, items, eps)
        vals["S"] = integrate_boundary(chart, "S", eps, metric_tag, self.spec)
        terms = {
            "four_thirds_pi2_chi": 4 * math.pi**2 * chi / 3,
            "W2": -vals[_key("W2", metric_tag)] / 24,
            "E2": vals[_key("E2", metric_tag)] / 12,
            "S": -vals["S"] / 3,
        }
        # 2 sigma_2(P) = 3 lambda^2 - |E|^2 / 4, integrated.
        sigma_form = 3 * vals[_key("lambda2", metric_tag)] - vals[_key("E2", metric_tag)] / 4
        checks = [
            _check(
                "schouten_identity",
                relative_error(vals[_key("sigma2P", metric_tag)], sigma_form),
                TOLERANCES["CGB"],
            )
        ]
        return _report(
            "CGB",
            chart,
            vals[_key("lambda2", metric_tag)],
            terms,
            integrals=vals,
            eps=eps,
            checks=checks,
        )

    # ===== Renormalized area =====

    def _ladder_terms(
        self, chart: Chart, items: Sequence[Item]
    ) -> tuple[ExpansionFit, dict[str, ExpansionFit]]:
        """Area fit plus the eps -> 0 limits of the other (convergent) items."""
        ladders = truncated_ladders(chart, [("one", "hyperbolic"), *items], self.ladder, self.spec)
        area = fit_expansion(self.ladder, ladders[0], area_basis(chart.n))
        area = area.model_copy(
            update={"chart": chart.name, "quantity": "one", "metric_tag": "hyperbolic"}
        )
        limits = {
            _key(q, t): limit_from_values(chart, q, t, self.ladder, values)
            for (q, t), values in zip(items, ladders[1:], strict=True)
        }
        return area, limits

    def _require_h3(self, chart: Chart) -> None:
        if chart.dom_dim != 2:
            raise VerificationError(f"{chart.name} is not a surface in H^3")
        if chart.closed or not chart.meets_boundary_orthogonally:
            raise VerificationError(
                f"{chart.name} does not meet the ideal boundary at a right angle",
                details={"orthogonal": chart.meets_boundary_orthogonally},
            )
        require_declared_asymptotics(chart, VerificationError)

    def _require_h5(self, chart: Chart) -> None:
        if chart.dom_dim != 4:
            raise VerificationError(f"{chart.name} is not a hypersurface in H^5")
        if chart.closed or chart.asym_minimal_order < 2:
            raise VerificationError(
                f"{chart.name} is not asymptotically minimal of order 2",
                details={"asym_minimal_order": chart.asym_minimal_order},
            )
        require_declared_asymptotics(chart, VerificationError)

    def _h3(self, chart: Chart) -> tuple[ExpansionFit, dict[str, ExpansionFit]]:
        self._require_h3(chart)
        items: list[Item] = [("H2", "hyperbolic"), ("H2", "euclidean"), ("B0sq", "hyperbolic")]
        return self._ladder_terms(chart, items)

    @staticmethod
    def _thm2_terms(limits: dict[str, ExpansionFit]) -> dict[str, float]:
        return {"H2_hyp": limits["H2_hyp"].finite_part, "H2_euc": -limits["H2_euc"].finite_part}

    @staticmethod
    def _cor1_terms(chart: Chart, limits: dict[str, ExpansionFit]) -> dict[str, float]:
        return {
            "two_pi_chi": -2 * math.pi * chart.euler_char,
            "B0sq_hyp": -0.5 * limits["B0sq_hyp"].finite_part,
            "H2_hyp": limits["H2_hyp"].finite_part,
        }

    @staticmethod
    def _fits(area: ExpansionFit, limits: dict[str, ExpansionFit]) -> dict[str, ExpansionFit]:
        return {"area": area, **limits}

    def thm2(self, chart: Chart) -> VerificationReport:
        """Renormalized area = hyperbolic bending - Euclidean bending."""
        area, limits = self._h3(chart)
        return _report(
            "THM2", chart, area.finite_part, self._thm2_terms(limits), fit=self._fits(area, limits)
        )

    def cor1(self, chart: Chart) -> VerificationReport:
        """Renormalized area = -2 pi chi - (1/2) int |B°|^2 + bending."""
        area, limits = self._h3(chart)
        terms = self._cor1_terms(chart, limits)
        thm2_rhs = ordered_sum(self._thm2_terms(limits).values())
        checks = [
            _check(
                "thm2_rhs_agreement",
                relative_error(ordered_sum(terms.values()), thm2_rhs),
                H3_CONSISTENCY,
            )
        ]
        alternatives = {"thm2_rhs": thm2_rhs}
        bending = limits["H2_hyp"].finite_part
        if abs(bending) <= 1e-12:
            minimal = -2 * math.pi * chart.euler_char - 0.5 * limits["B0sq_hyp"].finite_part
            alternatives["minimal_case_rhs"] = minimal
            checks.append(
                _check(
                    "minimal_case",
                    relative_error(area.finite_part, minimal),
                    TOLERANCES["COR1"],
                )
            )
        return _report(
            "COR1",
            chart,
            area.finite_part,
            terms,
            fit=self._fits(area, limits),
            alternatives=alternatives,
            checks=checks,
        )

    def _h5(self, chart: Chart, force: bool) -> tuple[ExpansionFit, dict[str, ExpansionFit]]:
        if force:
            if chart.dom_dim != 4:
                raise ChartError(f"{chart.name} is not a hypersurface in H^5")
        else:
            self._require_h5(chart)
        items: list[Item] = [
            ("H4", "hyperbolic"),
            ("H4", "euclidean"),
            ("H2lambda", "hyperbolic"),
            ("H2lambda", "euclidean"),
            ("E2", "hyperbolic"),
            ("E2", "euclidean"),
            ("B0sq_plus_laplacian", "hyperbolic"),
            ("W2", "hyperbolic"),
            ("B0sq4", "hyperbolic"),
        ]
        if force:
            # The bending integral is where a non-minimal boundary shows up first.
            items.insert(0, ("H2", "hyperbolic"))
        return self._ladder_terms(chart, items)

    @staticmethod
    def _thm3_terms(limits: dict[str, ExpansionFit]) -> dict[str, float]:
        L = {k: v.finite_part for k, v in limits.items()}
        return {
            "H4_hyp": L["H4_hyp"],
            "H4_euc": -L["H4_euc"],
            "H2lambda_hyp": -2 * L["H2lambda_hyp"],
            "H2lambda_euc": 2 * L["H2lambda_euc"],
            "E2_hyp": L["E2_hyp"] / 12,
            "E2_euc": -L["E2_euc"] / 12,
            "B0sq_plus_laplacian_hyp": -L["B0sq_plus_laplacian_hyp"] / 12,
        }

    @staticmethod
    def _cor2_terms(chart: Chart, limits: dict[str, ExpansionFit]) -> dict[str, float]:
        L = {k: v.finite_part for k, v in limits.items()}
        return {
            "four_thirds_pi2_chi": 4 * math.pi**2 * chart.euler_char / 3,
            "B0sq4_hyp": -L["B0sq4_hyp"] / 144,
            "W2_hyp": -L["W2_hyp"] / 24,
            "E2_hyp": L["E2_hyp"] / 12,
            "H4_hyp": L["H4_hyp"],
            "H2lambda_hyp": -2 * L["H2lambda_hyp"],
            "B0sq_plus_laplacian_hyp": -L["B0sq_plus_laplacian_hyp"] / 12,
        }

    def thm3(self, chart: Chart, force: bool = False) -> VerificationReport:
        """Renormalized area of an order-2 asymptotically minimal hypersurface of H^5."""
        area, limits = self._h5(chart, force)
        return _report(
            "THM3", chart, area.finite_part, self._thm3_terms(limits), fit=self._fits(area, limits)
        )

    def cor2(self, chart: Chart) -> VerificationReport:
        """Gauss-Bonnet type formula for the renormalized area in H^5."""
        area, limits = self._h5(chart, force=False)
        terms = self._cor2_terms(chart, limits)
        thm3_rhs = ordered_sum(self._thm3_terms(limits).values())
        checks = [
            _check(
                "thm3_rhs_agreement",
                relative_error(ordered_sum(terms.values()), thm3_rhs),
                H5_CONSISTENCY,
            )
        ]
        return _report(
            "COR2",
            chart,
            area.finite_part,
            terms,
            fit=self._fits(area, limits),
            alternatives={"thm3_rhs": thm3_rhs},
            checks=checks,
        )


# ===== Module-level entry points =====


def verify_prop1(
    chart: Chart,
    eps: float | None,
    with_topology: bool = False,
    spec: QuadratureSpec | None = None,
) -> VerificationReport:
    return TheoremService(spec).prop1(chart, eps, with_topology)


def verify_thm2(
    chart: Chart, ladder: Sequence[float] | None = None, spec: QuadratureSpec | None = None
) -> VerificationReport:
    return TheoremService(spec, ladder).thm2(chart)


def verify_cor1(
    chart: Chart, ladder: Sequence[float] | None = None, spec: QuadratureSpec | None = None
) -> VerificationReport:
    return TheoremService(spec, ladder).cor1(chart)


def verify_thm3(
    chart: Chart,
    ladder: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
    force: bool = False,
) -> VerificationReport:
    return TheoremService(spec, ladder).thm3(chart, force)


def verify_cor2(
    chart: Chart, ladder: Sequence[float] | None = None, spec: QuadratureSpec | None = None
) -> VerificationReport:
    return TheoremService(spec, ladder).cor2(chart)


def verify_gauss_bonnet(
    chart: Chart,
    eps: float | None,
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
) -> VerificationReport:
    return TheoremService(spec).gauss_bonnet(chart, eps, metric_tag)
