"""Test configuration and fixtures."""

import pytest

from src.renormgeo.schemas.geometry import SurfaceSpec
from src.renormgeo.schemas.quadrature import QuadratureSpec
from src.renormgeo.services.catalog import build_builtin, chart_from_spec
from src.renormgeo.services.chart import Chart
from src.renormgeo.services.renorm import default_ladder


@pytest.fixture(name="hemisphere")
def hemisphere_fixture() -> Chart:
    """Totally geodesic unit hemisphere in H^3."""
    return build_builtin("geodesic_hemisphere")


@pytest.fixture(name="perturbed")
def perturbed_fixture() -> Chart:
    """Non-minimal H^3 surface meeting the ideal boundary orthogonally."""
    return build_builtin("perturbed_hemisphere", {"delta": 0.05, "k": 2})


@pytest.fixture(name="hemisphere4")
def hemisphere4_fixture() -> Chart:
    """Totally geodesic 4-hemisphere in H^5."""
    return build_builtin("geodesic_hemisphere4")


@pytest.fixture(name="profile4")
def profile4_fixture() -> Chart:
    """Order-2 asymptotically minimal revolution hypersurface in H^5."""
    return build_builtin("perturbed_profile4")


@pytest.fixture(name="ellipsoidal4")
def ellipsoidal4_fixture() -> Chart:
    """Order-2 asymptotically minimal hypersurface with a non-umbilic boundary."""
    return build_builtin("perturbed_profile4", {"aspect": 1.2})


@pytest.fixture(name="sphere2")
def sphere2_fixture() -> Chart:
    """Closed unit S^2 at height 3."""
    return build_builtin("round_sphere", {"m": 2})


@pytest.fixture(name="sphere4")
def sphere4_fixture() -> Chart:
    """Closed unit S^4 at height 3."""
    return build_builtin("round_sphere", {"m": 4})


@pytest.fixture(name="flat_disk")
def flat_disk_fixture() -> Chart:
    """Unit disk in the plane z = 1, as a revolution profile."""
    spec = SurfaceSpec(
        name="flat_disk", profile=["u1", "1"], symmetry="revolution", domain=[(0.0, 1.0)]
    )
    return chart_from_spec(spec)


@pytest.fixture(name="quad_spec")
def quad_spec_fixture() -> QuadratureSpec:
    """Default quadrature with a single worker."""
    return QuadratureSpec(threads=1)


@pytest.fixture(name="ladder")
def ladder_fixture() -> list[float]:
    """The default eps-ladder 0.1 * 2^-k, k = 0..7."""
    return default_ladder(0.1, 2.0, 8)
