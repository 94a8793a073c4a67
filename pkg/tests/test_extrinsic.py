"""Tests for fundamental forms and extrinsic curvature under both metrics."""

import math

import numpy as np
import pytest

from src.renormgeo.core.exceptions import ChartError
from src.renormgeo.services.catalog import build_builtin
from src.renormgeo.services.chart import Chart
from src.renormgeo.services.extrinsic import (
    chen_invariant,
    chen_residuals,
    conformal_relations_check,
    conformal_residuals,
    extrinsic_fields,
    extrinsic_frame,
    flip_orientation,
    principal_curvatures,
    sample_surface,
)

# ===== Hemispheres =====


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_hemisphere_is_umbilic_and_totally_geodesic(a: float):
    """kappa_bar = +-1/a in the flat metric, kappa = 0 in the hyperbolic one."""
    chart = build_builtin("geodesic_hemisphere", {"a": a})
    frame = extrinsic_frame(chart, [0.6, 1.0])
    assert abs(frame.H_euc) == pytest.approx(1.0 / a)
    assert frame.kappas_euc[0] == pytest.approx(frame.kappas_euc[1])
    assert frame.H_hyp == pytest.approx(0.0, abs=1e-12)
    assert frame.B0sq_hyp == pytest.approx(0.0, abs=1e-12)


def test_normal_points_up(hemisphere: Chart):
    """The oriented normal has xi_z >= 0 and the hyperbolic density is z^-2 times the flat one."""
    frame = extrinsic_frame(hemisphere, [0.9, 2.0])
    assert frame.xi_z > 0
    assert frame.z == pytest.approx(math.cos(0.9))
    assert frame.area_density_hyp == pytest.approx(frame.area_density_euc / frame.z**2)


def test_four_dimensional_hemisphere(hemisphere4: Chart):
    """The 4-hemisphere is totally geodesic with four equal flat curvatures."""
    frame = extrinsic_frame(hemisphere4, [0.5, 1.0, 1.2, 2.0])
    assert len(frame.kappas_euc) == 4
    assert np.allclose(frame.kappas_euc, frame.kappas_euc[0])
    assert np.allclose(frame.kappas_hyp, 0.0, atol=1e-12)


# ===== Conformal relations =====


def test_conformal_relations_hold_on_perturbed_surface(perturbed: Chart):
    """kappa = z kappa_bar + xi_z and the H, R relations hold at random points."""
    rng = np.random.default_rng(7)
    for _ in range(10):
        point = [rng.uniform(0.1, 1.4), rng.uniform(0.1, 6.0)]
        residuals = conformal_relations_check(extrinsic_frame(perturbed, point))
        assert residuals.success, residuals.max_abs


def test_conformal_relations_in_h5(ellipsoidal4: Chart):
    """The relations hold for four principal curvatures too."""
    residuals = conformal_relations_check(extrinsic_frame(ellipsoidal4, [0.7, 1.2, 1.3, 0.8]))
    assert residuals.max_abs < 1e-9


def test_flipped_orientation_keeps_relations(perturbed: Chart):
    """Reversing the normal negates kappa and H but preserves every relation."""
    frame = extrinsic_frame(perturbed, [0.8, 0.4])
    flipped = flip_orientation(frame)
    assert flipped.H_hyp == pytest.approx(-frame.H_hyp)
    assert flipped.R_hyp == frame.R_hyp
    assert conformal_relations_check(flipped).success


# ===== Chen invariant =====


def test_chen_invariant_is_conformally_invariant(perturbed: Chart):
    """H^2 - R agrees with |B°|^2/2 and with z^2 (H_bar^2 - R_bar)."""
    frame = extrinsic_frame(perturbed, [1.0, 0.3])
    value = chen_invariant(frame)
    assert value >= 0
    assert value == pytest.approx(frame.z**2 * (frame.H_euc**2 - frame.R_euc))


def test_chen_invariant_vanishes_on_umbilic_surface(hemisphere: Chart):
    """Umbilic points have H^2 = R."""
    assert chen_invariant(extrinsic_frame(hemisphere, [0.4, 3.0])) == pytest.approx(0.0, abs=1e-12)


# ===== Batched sampling =====


def test_batched_fields_match_single_frames(perturbed: Chart):
    """Vectorized sampling reproduces the single-point frame values."""
    points = np.array([[0.3, 0.5], [0.9, 2.5], [1.3, 4.0]])
    fields = extrinsic_fields(sample_surface(perturbed, points), "hyperbolic")
    for k, point in enumerate(points):
        frame = extrinsic_frame(perturbed, point)
        assert fields.H[k] == pytest.approx(frame.H_hyp)
        assert fields.B0sq[k] == pytest.approx(frame.B0sq_hyp)


def test_sampling_below_the_half_space_rejected():
    """Charts must stay in {z > 0}."""
    chart = build_builtin("geodesic_hemisphere")
    with pytest.raises(ChartError):
        sample_surface(chart, np.array([[math.pi / 2 + 0.1, 1.0]]))


def test_batched_principal_curvatures_match_single_frames(perturbed: Chart):
    """Cholesky-reduced eigenvalues agree with the generalized eigen-solve of one frame."""
    points = np.array([[0.4, 0.7], [1.1, 3.3]])
    sample = sample_surface(perturbed, points)
    for tag, attr in (("euclidean", "kappas_euc"), ("hyperbolic", "kappas_hyp")):
        kappas = principal_curvatures(sample, tag)
        for k, point in enumerate(points):
            expected = getattr(extrinsic_frame(perturbed, point), attr)
            assert kappas[k] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("name", ["perturbed_hemisphere", "perturbed_profile4"])
def test_conformal_residuals_at_random_points(name: str):
    """The kappa, H, R and Chen relations hold to 1e-10 across a seeded random batch."""
    chart = build_builtin(name)
    lo = np.array([interval[0] for interval in chart.domain])
    hi = np.array([interval[1] for interval in chart.domain])
    rng = np.random.default_rng(7)
    points = lo + (hi - lo) * rng.uniform(0.1, 0.9, size=(256, chart.dom_dim))
    sample = sample_surface(chart, points)
    assert conformal_residuals(sample).shape == (256,)
    assert np.max(conformal_residuals(sample)) <= 1e-10
    assert np.max(chen_residuals(sample)) <= 1e-10
