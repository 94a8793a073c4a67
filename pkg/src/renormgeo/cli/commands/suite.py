"""`suite`: the acceptance checks as one batch run, with a summary table on stderr."""

import argparse
import math
import time
from collections.abc import Callable

import numpy as np

from ...core.exceptions import RenormGeoException
from ...core.handlers import EXIT_CHECK_FAILED, EXIT_OK
from ...schemas.geometry import SurfaceSpec
from ...schemas.quadrature import QuadratureSpec
from ...schemas.run import RunConfig, SuiteCheck, SuiteReport
from ...services.catalog import build_builtin, chart_from_spec
from ...services.intrinsic import pointwise_identity_residuals
from ...services.quadrature import integrate_boundary, integrate_interior
from ...services.renorm import (
    bform_expansion,
    boundary_s_constant_term,
    check_no_constant_term,
    finite_part,
    laplacian_correction_check,
)
from ...services.theorems import TheoremService
from ...utils.logging import logger
from ...utils.numerics import relative_error
from ..deps import get_ladder, get_quadrature_spec
from ..output import CommandResult

QUICK_OVERRIDES = {"rule": 24, "profile_rule": 32, "subdivision": 6}
CONFORMAL_POINTS = 10_000
CONFORMAL_BATCH = 1024
CONFORMAL_CHARTS = ("perturbed_hemisphere", "perturbed_profile4")
SEED = 20240917

FLAT_DISK = SurfaceSpec(
    name="flat_disk", profile=["u1", "1"], symmetry="revolution", domain=[(0.0, 1.0)]
)

Check = Callable[["SuiteContext"], list[SuiteCheck]]


class SuiteContext:
    """Quadrature rule, ladder and theorem service shared by every check."""

    def __init__(self, spec: QuadratureSpec, ladder: list[float]):
        self.spec = spec
        self.ladder = ladder
        self.service = TheoremService(spec, ladder)


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("suite", help="run the acceptance checks")
    parser.add_argument(
        "--quick",
        action="store_true",
        default=None,
        help="closed-form checks only, with reduced quadrature",
    )


def _compare(
    name: str, value: float, expected: float, tolerance: float, relative: bool = True
) -> SuiteCheck:
    error = relative_error(value, expected) if relative else abs(value - expected)
    return SuiteCheck(
        name=name, passed=error <= tolerance, value=value, expected=expected, error=error
    )


def _flag(name: str, passed: bool, value: float | None = None, detail: str | None = None) -> SuiteCheck:
    return SuiteCheck(name=name, passed=passed, value=value, detail=detail)


# ===== Closed-form checks =====


def hemisphere_finite_part(ctx: SuiteContext) -> list[SuiteCheck]:
    fit = finite_part(build_builtin("geodesic_hemisphere"), ladder=ctx.ladder, spec=ctx.spec)
    return [_compare("hemisphere_h3_finite_part", fit.finite_part, -2 * math.pi, 1e-6, False)]


def classical_gauss_bonnet(ctx: SuiteContext) -> list[SuiteCheck]:
    sphere = build_builtin("round_sphere", {"m": 2})
    disk = chart_from_spec(FLAT_DISK)
    area_k = integrate_interior(sphere, "K", None, "euclidean", ctx.spec)
    rim = integrate_boundary(disk, "kg", None, "euclidean", ctx.spec)
    return [
        _compare("gauss_bonnet_s2", area_k, 4 * math.pi, 1e-8),
        _compare("gauss_bonnet_flat_disk", rim, 2 * math.pi, 1e-10),
    ]


def chern_gauss_bonnet_s4(ctx: SuiteContext) -> list[SuiteCheck]:
    report = ctx.service.gauss_bonnet(build_builtin("round_sphere", {"m": 4}), None, "euclidean")
    lam2 = report.integrals["lambda2_euc"]
    flat = max(abs(report.integrals["W2_euc"]), abs(report.integrals["E2_euc"]))
    return [
        _compare("chern_gauss_bonnet_s4", lam2, 8 * math.pi**2 / 3, 1e-6),
        _flag("chern_gauss_bonnet_s4_einstein", flat <= 1e-10, flat),
    ]


def conformal_suite(ctx: SuiteContext) -> list[SuiteCheck]:
    rng = np.random.default_rng(SEED)
    worst: dict[str, float] = {}
    per_chart = CONFORMAL_POINTS // len(CONFORMAL_CHARTS)
    for name in CONFORMAL_CHARTS:
        chart = build_builtin(name)
        lo = np.array([interval[0] for interval in chart.domain])
        hi = np.array([interval[1] for interval in chart.domain])
        points = lo + (hi - lo) * rng.uniform(0.1, 0.9, size=(per_chart, chart.dom_dim))
        for start in range(0, per_chart, CONFORMAL_BATCH):
            residuals = pointwise_identity_residuals(chart, points[start : start + CONFORMAL_BATCH])
            for key, values in residuals.items():
                worst[key] = max(worst.get(key, 0.0), float(np.max(values)))
        logger.debug(f"conformal suite: {per_chart} points on {chart.name}")
    return [
        _flag("conformal_relations", worst["conformal"] <= 1e-10, worst["conformal"]),
        _flag("chen_invariant", worst["chen"] <= 1e-10, worst["chen"]),
        _flag("gauss_equation", worst["gauss"] <= 1e-9, worst["gauss"]),
        _flag("e2_extrinsic_vs_intrinsic", worst["e2"] <= 1e-8, worst["e2"]),
        _flag("weyl_density_covariance", worst["weyl"] <= 1e-9, worst["weyl"]),
    ]


def area_formula(ctx: SuiteContext) -> list[SuiteCheck]:
    checks = []
    for name in ("perturbed_hemisphere", "perturbed_profile4"):
        chart = build_builtin(name)
        for eps in (0.05, 0.1):
            report = ctx.service.prop1(chart, eps)
            checks.append(
                _compare(f"prop1_{name}_eps{eps:g}", report.lhs, report.rhs, report.tolerance)
            )
    return checks


# ===== Ladder checks =====


def renormalized_area_h3(ctx: SuiteContext) -> list[SuiteCheck]:
    checks = []
    for params in ({"delta": 0.05, "k": 2}, {"delta": 0.1, "k": 2}, {"delta": 0.05, "k": 3}):
        chart = build_builtin("perturbed_hemisphere", params)
        thm2 = ctx.service.thm2(chart)
        cor1 = ctx.service.cor1(chart)
        label = f"delta{params['delta']:g}_k{params['k']:g}"
        checks += [
            _compare(f"thm2_{label}", thm2.lhs, thm2.rhs, thm2.tolerance),
            _compare(f"cor1_{label}", cor1.lhs, cor1.rhs, cor1.tolerance),
            _compare(f"cor1_thm2_rhs_{label}", cor1.rhs, thm2.rhs, 1e-6),
        ]
    return checks


def renormalized_area_h5(ctx: SuiteContext) -> list[SuiteCheck]:
    hemisphere = build_builtin("geodesic_hemisphere4")
    cor2 = ctx.service.cor2(hemisphere)
    corrections = max(abs(v) for k, v in cor2.terms.items() if k != "four_thirds_pi2_chi")
    thm3 = ctx.service.thm3(build_builtin("perturbed_profile4"))
    return [
        _compare("hemisphere_h5_finite_part", cor2.lhs, 4 * math.pi**2 / 3, 1e-4),
        _compare("cor2_hemisphere_h5", cor2.rhs, 4 * math.pi**2 / 3, 1e-4),
        _flag("cor2_hemisphere_h5_corrections", corrections <= 1e-8, corrections),
        _compare("thm3_perturbed_profile4", thm3.lhs, thm3.rhs, thm3.tolerance),
    ]


def expansion_checks(ctx: SuiteContext) -> list[SuiteCheck]:
    chart = build_builtin("perturbed_profile4", {"aspect": 1.2})
    bform = bform_expansion(chart)
    laplacian = laplacian_correction_check(chart, ctx.ladder, ctx.spec)
    checks = [
        _flag("bform_no_odd_term", bform.passed, bform.b3, f"b2={bform.b2:.6g} b4={bform.b4:.6g}"),
        _compare("bform_b2_oracle", bform.b2, bform.b2_oracle, 1e-5),
        _flag("laplacian_correction", laplacian.passed, laplacian.finite_part_gap),
    ]
    for name in ("geodesic_hemisphere4", "perturbed_profile4"):
        s_check = boundary_s_constant_term(build_builtin(name), ctx.ladder, ctx.spec)
        checks.append(_flag(f"s_boundary_no_constant_{name}", s_check.passed, s_check.constant))
        eps = [row[0] for row in s_check.fit.ladder]
        shifted = [row[1] + 0.3 for row in s_check.fit.ladder]
        control = check_no_constant_term(eps, shifted)
        checks.append(_compare(
                f"s_boundary_injected_constant_{name}", control.constant, 0.3, 0.015, False
            ))
    return checks


QUICK_CHECKS: list[Check] = [hemisphere_finite_part, classical_gauss_bonnet, conformal_suite]
FULL_CHECKS: list[Check] = [
    hemisphere_finite_part,
    renormalized_area_h3,
    classical_gauss_bonnet,
    chern_gauss_bonnet_s4,
    renormalized_area_h5,
    expansion_checks,
    conformal_suite,
    area_formula,
]


def _run_check(check: Check, ctx: SuiteContext) -> list[SuiteCheck]:
    started = time.perf_counter()
    try:
        results = check(ctx)
    except RenormGeoException as exc:
        logger.warning(f"Suite check {check.__name__} failed: {exc.message}")
        results = [_flag(check.__name__, False, detail=f"{type(exc).__name__}: {exc.message}")]
    logger.info(f"{check.__name__}: {time.perf_counter() - started:.1f}s")
    return results


def _summary_table(checks: list[SuiteCheck]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  error"]
    for c in checks:
        error = "" if c.error is None else f"{c.error:.3e}"
        lines.append(f"{c.name:<{width}}  {'pass' if c.passed else 'FAIL':<6}  {error}")
    return "\n".join(lines)


def run(config: RunConfig) -> CommandResult:
    spec = get_quadrature_spec(config)
    if config.quick:
        spec = spec.model_copy(update=QUICK_OVERRIDES)
    ctx = SuiteContext(spec, get_ladder(config))
    checks: list[SuiteCheck] = []
    for check in QUICK_CHECKS if config.quick else FULL_CHECKS:
        checks += _run_check(check, ctx)

    failed = sum(not c.passed for c in checks)
    logger.info("Suite summary:\n" + _summary_table(checks))
    report = SuiteReport(
        success=failed == 0,
        quick=config.quick,
        checks=checks,
        passed=len(checks) - failed,
        failed=failed,
    )
    return report, EXIT_OK if failed == 0 else EXIT_CHECK_FAILED
