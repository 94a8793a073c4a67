"""Finite parts of truncated integrals and the near-boundary expansion of |B°|^2.

Every renormalized quantity is read off a geometric ladder eps_k = eps0 * ratio^-k by a
linear least-squares fit in a fixed exponent basis. The basis may contain the token "log"
(a log(eps) diagnostic term).
"""

from collections.abc import Sequence

import numpy as np
import scipy.linalg

from ..core.config import settings
from ..core.exceptions import ChartError, FitError, QuadratureError, VerificationError
from ..schemas.geometry import MetricTag
from ..schemas.quadrature import QuadratureSpec
from ..schemas.renorm import (
    BasisHonestyReport,
    BasisTerm,
    BFormExpansion,
    ConstantTermCheck,
    ExpansionFit,
    LaplacianCorrectionReport,
)
from ..utils.logging import logger
from ..utils.numerics import geometric_ladder, relative_error
from .chart import Chart, boundary_trace_free_norm
from .extrinsic import extrinsic_fields, require_declared_asymptotics, sample_surface
from .quadrature import (
    QuantityLike,
    integrate_boundary,
    integrate_interior,
    integrate_many,
    resolve_quantity,
)

MAX_COND = 1e10
FIT_TOLERANCE = 1e-6
CONVERGENT_BASIS: tuple[BasisTerm, ...] = (-1, 0, 1, 2, 3)
BFORM_EXPONENTS: tuple[int, ...] = (2, 3, 4, 5, 6)
S_BOUNDARY_BASIS: tuple[BasisTerm, ...] = (-3, -2, -1, 0, 1)
BFORM_R0 = 0.05


def default_basis(n: int) -> tuple[BasisTerm, ...]:
    """Area expansion basis: odd negative powers only, then the regular part."""
    return (-1, 0, 1, 2) if n == 1 else (-3, -1, 0, 1, 2)


def default_ladder(
    eps0: float | None = None, ratio: float | None = None, rungs: int | None = None
) -> list[float]:
    return geometric_ladder(
        eps0 or settings.eps0, ratio or settings.ladder_ratio, rungs or settings.rungs
    )


def _validate_ladder(ladder: Sequence[float], minimum: int) -> np.ndarray:
    eps = np.asarray(ladder, dtype=float)
    if eps.ndim != 1 or eps.size < minimum:
        raise FitError(
            f"ladder needs at least {minimum} samples", details={"samples": int(eps.size)}
        )
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise FitError(
            "ladder must be positive and strictly decreasing", details={"ladder": eps.tolist()}
        )
    return eps


def _column(eps: np.ndarray, term: BasisTerm) -> np.ndarray:
    return np.log(eps) if term == "log" else eps ** float(term)


# ===== Least-squares core =====


def fit_expansion(
    eps: Sequence[float],
    values: Sequence[float],
    basis: Sequence[BasisTerm],
    *,
    tolerance: float = FIT_TOLERANCE,
    designated: BasisTerm = 0,
) -> ExpansionFit:
    """Fit value(eps) = sum_j c_j eps^p_j with relative row weights and unit-norm columns.

    Raises:
        FitError: ill-conditioned design (cond > 1e10) or residual above ``tolerance``.
    """
    basis = list(basis)
    if designated not in basis:
        raise FitError("basis must contain the designated term", details={"basis": basis})
    if len(set(map(str, basis))) != len(basis):
        raise FitError("basis terms must be distinct", details={"basis": basis})
    x = _validate_ladder(eps, len(basis) + 1)
    y = np.asarray(values, dtype=float)
    if y.shape != x.shape:
        raise FitError(
            "ladder and values differ in length",
            details={"ladder": int(x.size), "values": int(y.size)},
        )

    weights = 1.0 / np.maximum(np.abs(y), 1.0)
    design = np.stack([_column(x, term) for term in basis], axis=-1) * weights[:, None]
    norms = np.linalg.norm(design, axis=0)
    scaled = design / norms
    solution, _, _, singular = scipy.linalg.lstsq(scaled, y * weights)
    cond = float(singular[0] / singular[-1]) if singular[-1] > 0 else float("inf")
    coefficients = solution / norms

    predicted = np.stack([_column(x, term) for term in basis], axis=-1) @ coefficients
    residual = float(np.max(np.abs(predicted - y) * weights))
    fit = ExpansionFit(
        exponents=basis,
        coefficients=coefficients.tolist(),
        finite_part=float(coefficients[basis.index(designated)]),
        residual=residual,
        cond=cond,
        ladder=list(zip(x.tolist(), y.tolist(), strict=True)),
    )
    if cond > MAX_COND:
        raise FitError(
            "fit design is ill-conditioned", details={"cond": cond, "basis": basis}
        )
    if residual > tolerance:
        raise FitError(
            "fit residual above tolerance",
            details={"residual": residual, "tolerance": tolerance, "fit": fit.model_dump()},
        )
    return fit


def truncated_ladder(
    chart: Chart,
    quantity: QuantityLike,
    ladder: Sequence[float],
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
) -> list[float]:
    """Truncated integrals over M_eps for every rung."""
    values = []
    for k, eps in enumerate(ladder):
        values.append(integrate_interior(chart, quantity, eps, metric_tag, spec))
        logger.debug(f"{chart.name}: rung {k} eps={eps:.3e} value={values[-1]:.15g}")
    return values


def finite_part(
    chart: Chart,
    quantity: QuantityLike = "one",
    ladder: Sequence[float] | None = None,
    basis: Sequence[BasisTerm] | None = None,
    metric_tag: MetricTag = "hyperbolic",
    spec: QuadratureSpec | None = None,
) -> ExpansionFit:
    """eps^0 coefficient of the truncated integral of ``quantity`` (the renormalized value)."""
    basis = list(basis or default_basis(chart.n))
    ladder = list(ladder or default_ladder())
    _validate_ladder(ladder, len(basis) + 2)
    values = truncated_ladder(chart, quantity, ladder, metric_tag, spec)
    fit = fit_expansion(ladder, values, basis)
    tag = resolve_quantity(quantity).tag
    logger.info(f"{chart.name}: finite part of {tag} ({metric_tag}) = {fit.finite_part:.12g}")
    return fit.model_copy(update={"chart": chart.name, "quantity": tag, "metric_tag": metric_tag})


def truncated_ladders(
    chart: Chart,
    items: Sequence[tuple[QuantityLike, MetricTag]],
    ladder: Sequence[float],
    spec: QuadratureSpec | None = None,
) -> list[list[float]]:
    """Ladders of several (quantity, metric) pairs, each rung sharing one set of nodes."""
    rows = []
    for k, eps in enumerate(ladder):
        rows.append(integrate_many(chart, items, eps, spec))
        logger.debug(f"{chart.name}: rung {k} eps={eps:.3e} ({len(items)} integrals)")
    return [list(column) for column in zip(*rows, strict=True)]


def limit_from_values(
    chart: Chart,
    quantity: QuantityLike,
    metric_tag: MetricTag,
    ladder: Sequence[float],
    values: Sequence[float],
) -> ExpansionFit:
    """Fit a ladder that should converge and return its eps -> 0 limit.

    Raises:
        QuadratureError: the ladder shows an eps^-1 term, or does not fit a convergent
            expansion at all.
    """
    tag = resolve_quantity(quantity).tag
    try:
        fit = fit_expansion(ladder, values, CONVERGENT_BASIS)
    except FitError as exc:
        raise QuadratureError(
            f"divergent: {tag} ladder on {chart.name} does not converge",
            details={
                "quantity": tag,
                "ladder": list(ladder),
                "values": list(values),
                "fit": exc.details,
            },
        )
    scale = max(max(abs(c) for c in fit.coefficients), 1.0)
    if abs(fit.coefficient(-1)) > FIT_TOLERANCE * scale:
        raise QuadratureError(
            f"divergent: {tag} ladder on {chart.name} has an eps^-1 term",
            details={"quantity": tag, "coefficient": fit.coefficient(-1), "scale": scale},
        )
    logger.info(f"{chart.name}: limit of {tag} ({metric_tag}) = {fit.finite_part:.12g}")
    return fit.model_copy(update={"chart": chart.name, "quantity": tag, "metric_tag": metric_tag})


def convergent_limit(
    chart: Chart,
    quantity: QuantityLike,
    metric_tag: MetricTag = "hyperbolic",
    ladder: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
) -> ExpansionFit:
    """eps -> 0 limit of a truncated integral that should converge."""
    ladder = list(ladder or default_ladder())
    values = truncated_ladder(chart, quantity, ladder, metric_tag, spec)
    return limit_from_values(chart, quantity, metric_tag, ladder, values)


def check_no_constant_term(
    eps: Sequence[float],
    values: Sequence[float],
    basis: Sequence[BasisTerm] = S_BOUNDARY_BASIS,
    tol: float = 1e-4,
) -> ConstantTermCheck:
    """Fit the ladder and test |c_0| <= tol * max(|c_j|, 1)."""
    fit = fit_expansion(eps, values, basis)
    scale = max(max(abs(c) for c in fit.coefficients), 1.0)
    passed = abs(fit.finite_part) <= tol * scale
    return ConstantTermCheck(
        success=passed,
        constant=fit.finite_part,
        scale=scale,
        tolerance=tol,
        passed=passed,
        fit=fit,
    )


def basis_honesty(
    chart: Chart,
    quantity: QuantityLike = "one",
    ladder: Sequence[float] | None = None,
    metric_tag: MetricTag = "hyperbolic",
    spec: QuadratureSpec | None = None,
) -> BasisHonestyReport:
    """Refit with the eps^-2 (and, for n = 2, log eps) terms added; they must fit to zero."""
    ladder = list(ladder or default_ladder())
    values = truncated_ladder(chart, quantity, ladder, metric_tag, spec)
    return basis_honesty_from_values(ladder, values, chart.n)


def basis_honesty_from_values(
    ladder: Sequence[float], values: Sequence[float], n: int
) -> BasisHonestyReport:
    base_basis = list(default_basis(n))
    extra: list[BasisTerm] = [-2] if n == 1 else [-2, "log"]
    base = fit_expansion(ladder, values, base_basis)
    extended = fit_expansion(ladder, values, base_basis + extra)
    scale = max(max(abs(c) for c in extended.coefficients), 1.0)
    extra_values = {str(p): extended.coefficient(p) for p in extra}
    shift = abs(extended.finite_part - base.finite_part)
    passed = shift <= 1e-6 and all(abs(v) <= 1e-5 * scale for v in extra_values.values())
    return BasisHonestyReport(
        success=passed,
        base=base,
        extended=extended,
        extra_terms=extra_values,
        finite_part_shift=shift,
        passed=passed,
    )


# ===== |B°|^2 near the ideal boundary =====


def _require_order_two(chart: Chart) -> None:
    if chart.dom_dim != 4 or chart.asym_minimal_order < 2:
        raise VerificationError(
            f"{chart.name} is not an asymptotically minimal (order 2) hypersurface of H^5",
            details={"dom_dim": chart.dom_dim, "asym_minimal_order": chart.asym_minimal_order},
        )
    require_declared_asymptotics(chart, VerificationError)


def bform_expansion(
    chart: Chart,
    along: Sequence[float] | None = None,
    r0: float = BFORM_R0,
    rungs: int | None = None,
) -> BFormExpansion:
    """Fit |B°|^2(r) = b_2 r^2 + b_3 r^3 + ... along the ray with transverse parameters ``along``.

    r is the height z. The fitted b_2 is compared with |II°|^2 of the ideal boundary.
    """
    _require_order_two(chart)
    transverse = list(along if along is not None else chart.reference[1:])
    if len(transverse) != chart.dom_dim - 1:
        raise ChartError(
            "a ray is given by the parameters after the height axis",
            details={"expected": chart.dom_dim - 1, "got": len(transverse)},
        )
    radii = geometric_ladder(r0, 2.0, rungs or settings.rungs)
    points = np.array([[chart.face_parameter(r), *transverse] for r in radii])
    if not chart.contains(points):
        raise ChartError("ray leaves the chart", details={"along": transverse})
    sample = sample_surface(chart, points)
    b0sq = extrinsic_fields(sample, "hyperbolic").B0sq
    r = sample.z
    # Rows divided by r^2: fit |B°|^2 / r^2 = b_2 + b_3 r + ...
    shifted: list[BasisTerm] = [p - 2 for p in BFORM_EXPONENTS]
    fit = fit_expansion(r, b0sq / r**2, shifted)
    fit = fit.model_copy(
        update={
            "exponents": list(BFORM_EXPONENTS),
            "ladder": list(zip(r.tolist(), b0sq.tolist(), strict=True)),
            "chart": chart.name,
            "quantity": "B0sq",
            "metric_tag": "hyperbolic",
        }
    )
    b2, b3, b4 = (fit.coefficient(p) for p in (2, 3, 4))
    oracle = boundary_trace_free_norm(chart, transverse)
    bound = 1e-6 * max(abs(b2), abs(b4), 1.0)
    passed = abs(b3) <= bound
    logger.info(f"{chart.name}: b2={b2:.3e} b3={b3:.3e} b4={b4:.3e} |II°|^2={oracle:.3e}")
    return BFormExpansion(
        success=passed,
        chart=chart.name,
        ray=transverse,
        b2=b2,
        b3=b3,
        b4=b4,
        b2_oracle=oracle,
        b2_error=abs(b2 - oracle),
        b3_bound=bound,
        passed=passed,
        fit=fit,
    )


def laplacian_correction_check(
    chart: Chart,
    ladder: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
) -> LaplacianCorrectionReport:
    """int 2|B°|^2 and int (2|B°|^2 + Delta|B°|^2) share their finite part; the latter converges."""
    _require_order_two(chart)
    ladder = list(ladder or default_ladder())
    b0sq_values, corrected_values = truncated_ladders(
        chart, [("B0sq", "hyperbolic"), ("B0sq_plus_laplacian", "hyperbolic")], ladder, spec
    )
    plain_values = [2 * v for v in b0sq_values]
    flux_values = [integrate_boundary(chart, "dn_B0sq", eps, "hyperbolic", spec) for eps in ladder]

    plain = fit_expansion(ladder, plain_values, CONVERGENT_BASIS)
    corrected = fit_expansion(ladder, corrected_values, CONVERGENT_BASIS)
    flux = fit_expansion(ladder, flux_values, CONVERGENT_BASIS)

    gap = relative_error(plain.finite_part, corrected.finite_part)
    divergence = abs(corrected.coefficient(-1))
    flux_scale = max(max(abs(c) for c in flux.coefficients), 1.0)
    flux_constant = flux.finite_part
    passed = gap <= 1e-5 and divergence <= 1e-6 and abs(flux_constant) <= 1e-5 * flux_scale
    logger.info(
        f"{chart.name}: finite parts {plain.finite_part:.12g} / {corrected.finite_part:.12g}, "
        f"flux constant {flux_constant:.3e}"
    )
    return LaplacianCorrectionReport(
        success=passed,
        chart=chart.name,
        plain=plain,
        corrected=corrected,
        flux=flux,
        finite_part_gap=gap,
        corrected_divergence=divergence,
        flux_constant=flux_constant,
        passed=passed,
    )


def boundary_s_constant_term(
    chart: Chart,
    ladder: Sequence[float] | None = None,
    spec: QuadratureSpec | None = None,
) -> ConstantTermCheck:
    """The S-curvature boundary integral over z = eps has no eps^0 term."""
    if chart.dom_dim != 4 or not chart.meets_boundary_orthogonally:
        raise VerificationError(
            f"{chart.name} is not a hypersurface of H^5 meeting the boundary orthogonally",
            details={"dom_dim": chart.dom_dim},
        )
    require_declared_asymptotics(chart, VerificationError)
    ladder = list(ladder or default_ladder())
    values = [integrate_boundary(chart, "S", eps, "hyperbolic", spec) for eps in ladder]
    check = check_no_constant_term(ladder, values, S_BOUNDARY_BASIS, tol=1e-4)
    logger.info(f"{chart.name}: S boundary constant term {check.constant:.3e}")
    return check
