"""Tests for truncated interior and boundary integrals."""

import math

import pytest

from src.renormgeo.core.exceptions import ChartError, QuadratureError
from src.renormgeo.schemas.quadrature import QuadratureSpec
from src.renormgeo.services.chart import Chart
from src.renormgeo.services.quadrature import (
    geometric_panels,
    integral_report,
    integrate_boundary,
    integrate_interior,
    integrate_many,
    is_integrable_at_boundary,
    refine_check,
)
from src.renormgeo.services.renorm import finite_part

# ===== Panels =====


def test_geometric_panels_halve_toward_the_face():
    """Panel widths halve toward the upper end and tile the interval."""
    assert geometric_panels(0.0, 1.0, 3) == [(0.0, 0.5), (0.5, 0.75), (0.75, 1.0)]


# ===== Closed-form areas =====


def test_unit_sphere_area(sphere2: Chart, quad_spec: QuadratureSpec):
    """The flat area of the unit S^2 is 4 pi."""
    assert integrate_interior(sphere2, "one", None, "euclidean", quad_spec) == pytest.approx(
        4 * math.pi, rel=1e-12
    )


def test_gauss_bonnet_integrand_on_sphere(sphere2: Chart, quad_spec: QuadratureSpec):
    """int K dA = 4 pi on S^2."""
    assert integrate_interior(sphere2, "K", None, "euclidean", quad_spec) == pytest.approx(
        4 * math.pi, rel=1e-10
    )


def test_four_sphere_volume_and_lambda_squared(sphere4: Chart, quad_spec: QuadratureSpec):
    """|S^4| = 8 pi^2 / 3 and lambda = 1, so int lambda^2 has the same value."""
    items = [("one", "euclidean"), ("lambda2", "euclidean")]
    area, lambda2 = integrate_many(sphere4, items, None, quad_spec)
    assert area == pytest.approx(8 * math.pi**2 / 3, rel=1e-10)
    assert lambda2 == pytest.approx(8 * math.pi**2 / 3, rel=1e-8)


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01, 1e-4])
def test_hyperbolic_area_of_truncated_hemisphere(
    hemisphere: Chart, quad_spec: QuadratureSpec, eps: float
):
    """Area of {z >= eps} on the geodesic hemisphere is 2 pi (1/eps - 1)."""
    value = integrate_interior(hemisphere, "one", eps, "hyperbolic", quad_spec)
    assert value == pytest.approx(2 * math.pi * (1 / eps - 1), rel=1e-10)


def test_flat_area_of_hemisphere(hemisphere: Chart, quad_spec: QuadratureSpec):
    """The full flat hemisphere has area 2 pi a^2."""
    assert integrate_interior(hemisphere, "one", 0.0, "euclidean", quad_spec) == pytest.approx(
        2 * math.pi, rel=1e-12
    )


# ===== Integrability at z = 0 =====


def test_divergent_integral_at_zero_rejected(hemisphere: Chart, quad_spec: QuadratureSpec):
    """The hyperbolic area is infinite; eps = 0 is refused."""
    with pytest.raises(QuadratureError) as info:
        integrate_interior(hemisphere, "one", 0.0, "hyperbolic", quad_spec)
    assert info.value.details["quantity"] == "one"


def test_decaying_integrand_allowed_at_zero(hemisphere: Chart, quad_spec: QuadratureSpec):
    """H^2 vanishes fast enough on an orthogonal surface; here it vanishes identically."""
    assert is_integrable_at_boundary(hemisphere, "H2")
    assert not is_integrable_at_boundary(hemisphere, "one")
    assert integrate_interior(hemisphere, "H2", 0.0, "hyperbolic", quad_spec) == pytest.approx(
        0.0, abs=1e-12
    )


def test_closed_chart_integrates_to_the_pole(sphere2: Chart, quad_spec: QuadratureSpec):
    """A closed chart above z = 0 needs no truncation in the hyperbolic metric."""
    value = integrate_interior(sphere2, "one", 0.0, "hyperbolic", quad_spec)
    assert value > 0 and math.isfinite(value)


def test_unknown_quantity(hemisphere: Chart):
    """Unknown integrands list the available ones."""
    with pytest.raises(ChartError) as info:
        integrate_interior(hemisphere, "mystery", 0.1, "hyperbolic")
    assert "H2" in info.value.details["available"]


# ===== Boundary integrals =====


def test_turning_of_the_unit_circle(flat_disk: Chart, quad_spec: QuadratureSpec):
    """The rim of the flat disk has total geodesic curvature 2 pi."""
    assert integrate_boundary(flat_disk, "kg", None, "euclidean", quad_spec) == pytest.approx(
        2 * math.pi
    )


def test_hyperbolic_length_of_level_circle(hemisphere: Chart, quad_spec: QuadratureSpec):
    """The circle z = eps on the hemisphere has radius sqrt(1 - eps^2) and length 2 pi r / eps."""
    eps = 0.2
    expected = 2 * math.pi * math.sqrt(1 - eps**2) / eps
    assert integrate_boundary(hemisphere, "one", eps, "hyperbolic", quad_spec) == pytest.approx(
        expected
    )


def test_hyperbolic_boundary_at_zero_rejected(hemisphere: Chart, quad_spec: QuadratureSpec):
    """The ideal boundary has infinite hyperbolic length."""
    with pytest.raises(QuadratureError):
        integrate_boundary(hemisphere, "one", 0.0, "hyperbolic", quad_spec)


def test_closed_chart_has_no_boundary(sphere2: Chart):
    """Untruncated closed charts contribute no boundary term."""
    assert integrate_boundary(sphere2, "kg", None, "euclidean") == 0.0


def test_boundary_quantity_needs_matching_dimension(hemisphere: Chart, flat_disk: Chart):
    """S belongs to 4-manifolds; unknown names are rejected."""
    with pytest.raises(ChartError):
        integrate_boundary(flat_disk, "S", None, "euclidean")
    with pytest.raises(ChartError):
        integrate_boundary(hemisphere, "torsion", 0.1, "hyperbolic")


# ===== Determinism and refinement =====


def test_results_do_not_depend_on_worker_count(perturbed: Chart):
    """Per-panel sums are reduced in order, so one worker and four agree bit for bit."""
    single = integrate_interior(perturbed, "H2", 0.05, "hyperbolic", QuadratureSpec(threads=1))
    pooled = integrate_interior(perturbed, "H2", 0.05, "hyperbolic", QuadratureSpec(threads=4))
    assert single == pooled


def test_refine_check_accepts_converged_rule(hemisphere: Chart, quad_spec: QuadratureSpec):
    """Two extra panels leave a resolved integral unchanged."""
    value = refine_check(hemisphere, "one", 0.1, "hyperbolic", quad_spec)
    assert value == pytest.approx(2 * math.pi * 9, rel=1e-10)


def test_refine_check_rejects_coarse_rule(perturbed: Chart):
    """A two-point rule on a rippled surface moves under refinement."""
    spec = QuadratureSpec(
        rule=2, profile_rule=2, subdivision=1, threads=1, tolerance=1e-14, check_refinement=False
    )
    with pytest.raises(QuadratureError):
        refine_check(perturbed, "H2", None, "hyperbolic", spec)


def test_interior_integral_rejects_unconverged_rule(perturbed: Chart):
    """Every interior integral is compared against two extra panels before it is returned."""
    spec = QuadratureSpec(rule=2, profile_rule=2, subdivision=1, threads=1, tolerance=1e-14)
    with pytest.raises(QuadratureError) as info:
        integrate_interior(perturbed, "H2", None, "hyperbolic", spec)
    assert info.value.details["quantity"] == "H2"
    assert info.value.details["relative_change"] > 1e-14


def test_refinement_comparison_can_be_switched_off(perturbed: Chart):
    """With the comparison off the coarse value comes back unchecked."""
    spec = QuadratureSpec(
        rule=2, profile_rule=2, subdivision=1, threads=1, tolerance=1e-14, check_refinement=False
    )
    value = integrate_interior(perturbed, "H2", None, "hyperbolic", spec)
    assert math.isfinite(value)


def test_ladder_integrals_go_through_the_refinement_comparison(perturbed: Chart):
    """finite_part inherits the convergence check from the quadrature layer."""
    spec = QuadratureSpec(rule=2, profile_rule=2, subdivision=1, threads=1, tolerance=1e-14)
    with pytest.raises(QuadratureError):
        finite_part(perturbed, "H2", spec=spec)


# ===== Reports =====


def test_integral_report(hemisphere: Chart, quad_spec: QuadratureSpec):
    """The report carries the value together with the rule size."""
    report = integral_report(hemisphere, "one", 0.1, "hyperbolic", quad_spec)
    assert report.value == pytest.approx(18 * math.pi, rel=1e-10)
    assert report.panels >= quad_spec.subdivision
    assert report.nodes == report.panels * quad_spec.profile_rule
    boundary = integral_report(hemisphere, "one", 0.1, "hyperbolic", quad_spec, boundary=True)
    assert boundary.boundary and boundary.panels == 1
