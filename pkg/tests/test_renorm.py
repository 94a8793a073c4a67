"""Tests for asymptotic fits, finite parts and the |B°|^2 expansion."""

import math

import numpy as np
import pytest

from src.renormgeo.core.exceptions import FitError, QuadratureError, VerificationError
from src.renormgeo.schemas.quadrature import QuadratureSpec
from src.renormgeo.services.catalog import build_builtin
from src.renormgeo.services.chart import Chart, expression_chart
from src.renormgeo.services.expr import parse_expr
from src.renormgeo.services.renorm import (
    CONVERGENT_BASIS,
    S_BOUNDARY_BASIS,
    basis_honesty,
    basis_honesty_from_values,
    bform_expansion,
    boundary_s_constant_term,
    check_no_constant_term,
    convergent_limit,
    default_basis,
    default_ladder,
    finite_part,
    fit_expansion,
    laplacian_correction_check,
    limit_from_values,
)

# ===== Ladders and bases =====


def test_default_ladder_is_geometric():
    """eps_k = eps0 * ratio^-k, strictly decreasing."""
    assert default_ladder(0.1, 2.0, 4) == pytest.approx([0.1, 0.05, 0.025, 0.0125])


def test_default_basis_skips_even_negative_powers():
    """Surfaces diverge like 1/eps, 4-manifolds like 1/eps^3 and 1/eps."""
    assert default_basis(1) == (-1, 0, 1, 2)
    assert default_basis(2) == (-3, -1, 0, 1, 2)


# ===== Least squares =====


def test_synthetic_expansion_recovers_constant(ladder: list[float]):
    """3/eps + 5 + 2 eps fits exactly with finite part 5."""
    eps = np.asarray(ladder)
    fit = fit_expansion(ladder, 3 / eps + 5 + 2 * eps, default_basis(1))
    assert fit.finite_part == pytest.approx(5.0, rel=1e-10)
    assert fit.coefficient(-1) == pytest.approx(3.0, rel=1e-10)
    assert fit.coefficient(2) == pytest.approx(0.0, abs=1e-6)
    assert fit.residual < 1e-12


def test_injected_constant_is_recovered(ladder: list[float]):
    """Adding 0.3 to the hemisphere area moves the finite part by exactly 0.3."""
    eps = np.asarray(ladder)
    area = 2 * math.pi * (1 / eps - 1)
    shifted = fit_expansion(ladder, area + 0.3, default_basis(1))
    assert shifted.finite_part == pytest.approx(-2 * math.pi + 0.3, rel=1e-10)


def test_finite_part_is_stable_under_rounding_noise(ladder: list[float]):
    """Uniform noise of size 1e-10 on every rung moves the finite part by at most 1e-7."""
    eps = np.asarray(ladder)
    area = 2 * math.pi * (1 / eps - 1)
    clean = fit_expansion(ladder, area, default_basis(1)).finite_part
    rng = np.random.default_rng(5)
    shifts = []
    for _ in range(200):
        noisy = area + 1e-10 * rng.uniform(-1.0, 1.0, size=area.shape)
        shifts.append(abs(fit_expansion(ladder, noisy, default_basis(1)).finite_part - clean))
    assert max(shifts) <= 1e-7


def test_short_ladder_rejected():
    """A basis of k terms needs at least k + 1 rungs."""
    with pytest.raises(FitError) as info:
        fit_expansion([0.1, 0.05, 0.025], [1.0, 2.0, 3.0], default_basis(1))
    assert info.value.details["samples"] == 3


def test_ladder_must_decrease():
    """Rungs are positive and strictly decreasing."""
    with pytest.raises(FitError):
        fit_expansion([0.1, 0.2, 0.05, 0.01, 0.005, 0.001], [1.0] * 6, (0, 1))


def test_ill_conditioned_design_rejected(ladder: list[float]):
    """Nearly identical columns are refused rather than extrapolated."""
    with pytest.raises(FitError) as info:
        fit_expansion(ladder, [1.0] * len(ladder), (0, 1e-13))
    assert info.value.details["cond"] > 1e10


def test_residual_above_tolerance_rejected(ladder: list[float]):
    """An eps^-2 term the basis cannot express leaves a residual."""
    eps = np.asarray(ladder)
    with pytest.raises(FitError) as info:
        fit_expansion(ladder, 1 / eps**2 + 1 / eps, default_basis(1))
    assert info.value.details["residual"] > 1e-6


def test_basis_needs_designated_term(ladder: list[float]):
    """The eps^0 term must be part of the basis."""
    with pytest.raises(FitError):
        fit_expansion(ladder, [1.0] * len(ladder), (-1, 1))


# ===== Convergent limits =====


def test_limit_of_convergent_ladder(hemisphere: Chart, ladder: list[float]):
    """1 + eps^2 tends to 1."""
    eps = np.asarray(ladder)
    fit = limit_from_values(hemisphere, "H2", "hyperbolic", ladder, 1 + eps**2)
    assert fit.finite_part == pytest.approx(1.0, rel=1e-10)
    assert fit.exponents == list(CONVERGENT_BASIS)


def test_limit_of_divergent_ladder(hemisphere: Chart, ladder: list[float]):
    """A 1/eps term means the integral does not converge."""
    eps = np.asarray(ladder)
    with pytest.raises(QuadratureError) as info:
        limit_from_values(hemisphere, "one", "hyperbolic", ladder, 1 / eps + 1)
    assert "divergent" in info.value.message


def test_convergent_limit_of_vanishing_bending(hemisphere: Chart, ladder: list[float]):
    """int H^2 dA is zero on the totally geodesic hemisphere."""
    fit = convergent_limit(hemisphere, "H2", "hyperbolic", ladder, QuadratureSpec(threads=1))
    assert fit.finite_part == pytest.approx(0.0, abs=1e-10)


# ===== Constant terms and extra basis terms =====


def test_constant_free_boundary_ladder(ladder: list[float]):
    """4/eps^3 + 1/eps + eps/5 has no constant term; adding 0.3 is detected."""
    eps = np.asarray(ladder)
    clean = 4 / eps**3 + 1 / eps + 0.2 * eps
    assert check_no_constant_term(ladder, clean, S_BOUNDARY_BASIS).passed
    dirty = check_no_constant_term(ladder, clean + 0.3, S_BOUNDARY_BASIS)
    assert not dirty.passed
    assert dirty.constant == pytest.approx(0.3, abs=1e-3)


def test_extra_basis_terms_fit_to_zero_on_honest_data(ladder: list[float]):
    """The eps^-2 term stays at zero when the data has no such term."""
    eps = np.asarray(ladder)
    report = basis_honesty_from_values(ladder, 2 * math.pi * (1 / eps - 1), 1)
    assert report.passed
    assert report.extra_terms["-2"] == pytest.approx(0.0, abs=1e-8)


def test_extra_basis_terms_flag_hidden_terms(ladder: list[float]):
    """An eps^-2 term outside the area basis cannot be fitted away."""
    eps = np.asarray(ladder)
    values = 2 * math.pi * (1 / eps - 1) + 0.05 / eps**2
    with pytest.raises(FitError):
        basis_honesty_from_values(ladder, values, 1)


def test_basis_honesty_on_hemisphere(hemisphere: Chart, ladder: list[float]):
    """The hemisphere area ladder needs no extra terms."""
    report = basis_honesty(hemisphere, ladder=ladder, spec=QuadratureSpec(threads=1))
    assert report.passed
    assert report.finite_part_shift < 1e-6


# ===== Finite parts from quadrature =====


def test_hemisphere_renormalized_area(hemisphere: Chart, ladder: list[float]):
    """The geodesic hemisphere has renormalized area -2 pi."""
    fit = finite_part(hemisphere, ladder=ladder, spec=QuadratureSpec(threads=1))
    assert fit.finite_part == pytest.approx(-2 * math.pi, rel=1e-7)
    assert fit.chart == hemisphere.name
    assert fit.quantity == "one"


def test_scaled_hemisphere_renormalized_area(ladder: list[float]):
    """Renormalized area does not depend on the radius."""
    chart = build_builtin("geodesic_hemisphere", {"a": 3.0})
    fit = finite_part(chart, ladder=ladder, spec=QuadratureSpec(threads=1))
    assert fit.finite_part == pytest.approx(-2 * math.pi, rel=1e-7)


@pytest.mark.slow
def test_four_hemisphere_renormalized_area(hemisphere4: Chart, ladder: list[float]):
    """The totally geodesic 4-hemisphere has renormalized volume 4 pi^2 / 3."""
    fit = finite_part(hemisphere4, ladder=ladder, spec=QuadratureSpec(threads=1))
    assert fit.finite_part == pytest.approx(4 * math.pi**2 / 3, rel=1e-6)


# ===== |B°|^2 near the ideal boundary =====


@pytest.mark.slow
def test_bform_leading_coefficient_is_boundary_norm(ellipsoidal4: Chart):
    """|B°|^2 = b2 z^2 + O(z^4) with b2 = |II°|^2 of the boundary ellipsoid."""
    s = 1.1
    report = bform_expansion(ellipsoidal4, along=[s, math.pi / 2, math.pi / 2])
    assert report.passed
    assert report.b2_oracle == pytest.approx(float(ellipsoidal4.boundary_b2(np.array(s))))
    assert report.b2 == pytest.approx(report.b2_oracle, rel=1e-5, abs=1e-8)


def test_bform_on_round_boundary_vanishes(profile4: Chart):
    """An SO(4)-symmetric hypersurface has an umbilic boundary: b2 = 0."""
    report = bform_expansion(profile4)
    assert report.b2_oracle == pytest.approx(0.0, abs=1e-12)
    assert report.b2 == pytest.approx(0.0, abs=1e-8)


def test_bform_needs_order_two_hypersurface(hemisphere: Chart):
    """The expansion is stated for asymptotically minimal hypersurfaces of H^5."""
    with pytest.raises(VerificationError):
        bform_expansion(hemisphere)


def test_bform_samples_the_declared_order():
    """A hypersurface whose H tends to a constant at z = 0 is refused despite its flag."""
    exprs = [parse_expr("sin(u1)*(1 + 0.2*cos(u1))"), parse_expr("cos(u1)")]
    chart = expression_chart(
        "tilted_cap", exprs, [(0.0, math.pi / 2)], symmetry="revolution", dom_dim=4, asym_order=2
    )
    with pytest.raises(VerificationError) as info:
        bform_expansion(chart)
    assert info.value.details["asym_minimal_order"] == 2


@pytest.mark.slow
def test_laplacian_correction_keeps_finite_part(ellipsoidal4: Chart, ladder: list[float]):
    """Adding Delta |B°|^2 cancels the divergence without moving the finite part."""
    report = laplacian_correction_check(ellipsoidal4, ladder, QuadratureSpec(threads=1))
    assert report.passed, report.model_dump()


@pytest.mark.slow
def test_s_boundary_integral_has_no_constant_term(profile4: Chart, ladder: list[float]):
    """oint S over z = eps contributes no finite part."""
    check = boundary_s_constant_term(profile4, ladder, QuadratureSpec(threads=1))
    assert check.passed


def test_s_boundary_needs_orthogonal_hypersurface(sphere4: Chart):
    """Closed charts do not reach the ideal boundary."""
    with pytest.raises(VerificationError):
        boundary_s_constant_term(sphere4)
