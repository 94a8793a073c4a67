"""Immersion charts u -> (x_1, ..., x_2n, z) and their evaluation through jets.

Parameter axis 0 is the height axis: z decreases along it and depends on nothing else, so
the truncation {z >= eps} is the interval [lo_0, face_parameter(eps)] on that axis. Its
``hi`` end is the ideal boundary {z = 0} (or a pole for closed charts).

Revolution charts integrate only over their first ``profile_dims`` axes; the remaining
fiber angles are frozen at ``fiber_point`` where the fiber metric is orthonormal, and the
integral is scaled by ``symmetry_factor`` (the volume of the unit fiber sphere).
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal

import numpy as np
from scipy.optimize import brentq

from ..core.exceptions import ChartError, RankDeficiencyError
from ..utils.logging import logger
from ..utils.numerics import gcos, gsin
from .expr import ExprAst, evaluate, max_param
from .jets import MAX_ORDER, Jet, jet_variables

Symmetry = Literal["none", "revolution"]
CoordinateMap = Callable[[Sequence[Any]], list[Any]]

GRAM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Chart:
    """A parametrized hypersurface piece with topology and asymptotics metadata."""

    name: str
    dom_dim: int
    domain: tuple[tuple[float, float], ...]
    coordinates: CoordinateMap = field(repr=False)
    reference: tuple[float, ...]
    symmetry: Symmetry = "none"
    euler_char: int = 1
    meets_boundary_orthogonally: bool = False
    asym_minimal_order: int = 0
    closed: bool = False
    profile_dims: int | None = None
    symmetry_factor: float = 1.0
    builtin: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    exprs: tuple[ExprAst, ...] | None = field(default=None, repr=False)
    face: Callable[[float], float] | None = field(default=None, repr=False)
    boundary_b2: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.dom_dim not in (2, 4):
            raise ChartError("dom_dim must be 2 or 4", details={"dom_dim": self.dom_dim})
        if len(self.domain) != self.dom_dim:
            raise ChartError(
                "domain needs one [lo, hi] interval per parameter axis",
                details={"dom_dim": self.dom_dim, "axes": len(self.domain)},
            )
        for axis, (lo, hi) in enumerate(self.domain):
            if not lo < hi:
                raise ChartError(
                    f"empty domain interval on axis {axis}", details={"lo": lo, "hi": hi}
                )
        if len(self.reference) != self.dom_dim or not self.contains(self.reference):
            raise ChartError(
                "reference point must lie inside the domain",
                details={"reference": list(self.reference)},
            )
        if self.asym_minimal_order not in (0, 1, 2):
            raise ChartError(
                "asym_minimal_order must be 0, 1 or 2",
                details={"asym_minimal_order": self.asym_minimal_order},
            )
        if self.profile_dims is None:
            object.__setattr__(self, "profile_dims", self.dom_dim)

    # ===== Metadata =====

    @property
    def ambient_dim(self) -> int:
        return self.dom_dim + 1

    @property
    def n(self) -> int:
        """Half the dimension: H^{2n+1} is the ambient space."""
        return self.dom_dim // 2

    @property
    def fiber_point(self) -> tuple[float, ...]:
        assert self.profile_dims is not None
        return tuple(self.reference[self.profile_dims :])

    def contains(self, point: Sequence[float] | np.ndarray, closed: bool = False) -> bool:
        """Whether every point lies in the (open or closed) parameter box."""
        point = np.atleast_2d(np.asarray(point, dtype=float))
        lo = np.array([interval[0] for interval in self.domain])
        hi = np.array([interval[1] for interval in self.domain])
        if closed:
            return bool(np.all((point >= lo) & (point <= hi)))
        return bool(np.all((point > lo) & (point < hi)))

    def full_points(self, profile_points: np.ndarray) -> np.ndarray:
        """Append the frozen fiber angles to profile-axis points, shape (N, dom_dim)."""
        profile_points = np.atleast_2d(np.asarray(profile_points, dtype=float))
        fiber = np.broadcast_to(
            np.asarray(self.fiber_point), (profile_points.shape[0], len(self.fiber_point))
        )
        return np.concatenate([profile_points, fiber], axis=1)

    # ===== Height and truncation =====

    def height(self, t: np.ndarray | float) -> np.ndarray:
        """z along the height axis (other axes at the reference point)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        points = np.tile(np.asarray(self.reference, dtype=float), (t.size, 1))
        points[:, 0] = t
        values = self.coordinates([points[:, k] for k in range(self.dom_dim)])
        return np.broadcast_to(np.asarray(values[-1], dtype=float), t.shape).copy()

    def face_parameter(self, eps: float | None) -> float:
        """Height-axis value of the level set z = eps (the domain's hi end for None)."""
        lo, hi = self.domain[0]
        if eps is None:
            return hi
        if eps < 0:
            raise ChartError("eps must be non-negative", details={"eps": eps})
        if self.face is not None:
            return self.face(eps)

        z_lo, z_hi = (float(v) for v in self.height(np.array([lo, hi])))
        if eps >= z_lo:
            raise ChartError(
                f"truncation z >= {eps} is empty on chart {self.name}",
                details={"eps": eps, "z_max": z_lo},
            )
        if eps <= z_hi:
            return hi
        return float(brentq(lambda t: float(self.height(t)[0]) - eps, lo, hi, xtol=1e-15))

    # ===== Orientation =====

    @cached_property
    def orientation(self) -> int:
        """Global sign making the Euclidean normal point up (xi_z >= 0) at the reference."""
        coords = coordinate_jets(self, np.asarray(self.reference), order=1)
        tangents = np.stack([c.gradient() for c in coords], axis=-1)
        normal = cofactor_normal(tangents[None, ...])[0]
        sign = -1 if normal[-1] < 0 else 1
        logger.debug(f"Chart {self.name}: orientation sign {sign}")
        return sign


# ===== Evaluation =====


def coordinate_jets(chart: Chart, point: np.ndarray, order: int) -> tuple[Jet, ...]:
    """Jets of every ambient coordinate at one point (dom_dim,) or a batch (N, dom_dim)."""
    if not 0 <= order <= MAX_ORDER:
        raise ChartError(f"order must be in 0..{MAX_ORDER}", details={"order": order})
    point = np.asarray(point, dtype=float)
    variables = jet_variables(point, order)
    batch = point.shape[:-1]
    coords = []
    for value in chart.coordinates(variables):
        if not isinstance(value, Jet):
            # Constant coordinate (e.g. a flat disk's height).
            value = Jet.constant(np.broadcast_to(value, batch).copy(), chart.dom_dim, order)
        coords.append(value)
    if len(coords) != chart.ambient_dim:
        raise ChartError(
            "chart map must return one expression per ambient coordinate",
            details={"expected": chart.ambient_dim, "got": len(coords)},
        )
    return tuple(coords)


def eval_chart(chart: Chart, point: Sequence[float] | np.ndarray, order: int) -> tuple[Jet, ...]:
    """Jets of all ambient coordinates at an interior parameter point."""
    point = np.asarray(point, dtype=float)
    if point.shape[-1] != chart.dom_dim:
        raise ChartError(
            "point dimension does not match the chart",
            details={"dom_dim": chart.dom_dim, "point": point.tolist()},
        )
    if not chart.contains(point):
        raise ChartError(
            f"point outside the open domain of chart {chart.name}",
            details={"point": point.tolist(), "domain": [list(i) for i in chart.domain]},
        )
    return coordinate_jets(chart, point, order)


def cofactor_normal(tangents: np.ndarray) -> np.ndarray:
    """Unit normal from (N, d, d+1) tangent rows via signed maximal minors."""
    d = tangents.shape[-2]
    columns = np.arange(d + 1)
    components = []
    for k in range(d + 1):
        minor = tangents[..., columns != k]
        components.append((-1) ** k * np.linalg.det(minor))
    normal = np.stack(components, axis=-1)
    norm = np.linalg.norm(normal, axis=-1)
    if np.any(norm <= math.sqrt(GRAM_TOLERANCE)):
        raise RankDeficiencyError(
            "chart differential is rank deficient",
            details={"min_gram_determinant": float(np.min(norm) ** 2)},
        )
    return normal / norm[..., None]


def require_full_rank(metric: np.ndarray) -> None:
    """Raise when any Gram determinant falls below the rank tolerance."""
    det = np.linalg.det(metric)
    if np.any(det <= GRAM_TOLERANCE):
        raise RankDeficiencyError(
            "Gram determinant below tolerance",
            details={"min_gram_determinant": float(np.min(det)), "tolerance": GRAM_TOLERANCE},
        )


# ===== Revolution sweeps =====


def circle(psi: Any) -> list[Any]:
    return [gcos(psi), gsin(psi)]


def sphere2(psi1: Any, psi2: Any) -> list[Any]:
    return [gcos(psi1), gsin(psi1) * gcos(psi2), gsin(psi1) * gsin(psi2)]


def sphere3(psi1: Any, psi2: Any, psi3: Any) -> list[Any]:
    s1 = gsin(psi1)
    s12 = s1 * gsin(psi2)
    return [gcos(psi1), s1 * gcos(psi2), s12 * gcos(psi3), s12 * gsin(psi3)]


def sweep_profile(rho: Any, z: Any, angles: Sequence[Any]) -> list[Any]:
    """Rotate the profile point (rho, z) under SO(2) or SO(4) about the z-axis."""
    fiber = circle(*angles) if len(angles) == 1 else sphere3(*angles)
    return [rho * w for w in fiber] + [z]


FIBER_DOMAINS = {
    1: ((0.0, 2 * math.pi),),
    2: ((0.0, math.pi), (0.0, 2 * math.pi)),
    3: ((0.0, math.pi), (0.0, math.pi), (0.0, 2 * math.pi)),
}
FIBER_POINTS = {1: (math.pi / 2,), 2: (math.pi / 2, math.pi / 2), 3: (math.pi / 2,) * 3}
FIBER_VOLUMES = {1: 2 * math.pi, 2: 4 * math.pi, 3: 2 * math.pi**2}


# ===== Expression charts =====


def expression_chart(
    name: str,
    exprs: Sequence[ExprAst],
    domain: Sequence[tuple[float, float]],
    *,
    symmetry: Symmetry = "none",
    dom_dim: int | None = None,
    reference: Sequence[float] | None = None,
    euler_char: int = 1,
    orthogonal: bool = False,
    asym_order: int = 0,
    closed: bool = False,
) -> Chart:
    """Build a chart from parsed expressions (full map, or a [rho, z] profile)."""
    exprs = tuple(exprs)
    if symmetry == "revolution":
        if len(exprs) != 2:
            raise ChartError("a revolution profile needs exactly [rho, z]")
        dom_dim = dom_dim or 2
        if dom_dim not in (2, 4):
            raise ChartError("dom_dim must be 2 or 4", details={"dom_dim": dom_dim})
        if len(domain) != 1:
            raise ChartError("a revolution profile takes a single [lo, hi] interval")
        if max(max_param(e) for e in exprs) > 0:
            raise ChartError("a revolution profile may only depend on u1")
        fiber_dims = dom_dim - 1
        full_domain = (tuple(domain[0]), *FIBER_DOMAINS[fiber_dims])
        ref0 = reference[0] if reference else 0.5 * (domain[0][0] + domain[0][1])
        rho_expr, z_expr = exprs

        def coordinates(u: Sequence[Any]) -> list[Any]:
            return sweep_profile(evaluate(rho_expr, list(u)), evaluate(z_expr, list(u)), u[1:])

        return Chart(
            name=name,
            dom_dim=dom_dim,
            domain=full_domain,
            coordinates=coordinates,
            reference=(ref0, *FIBER_POINTS[fiber_dims]),
            symmetry="revolution",
            euler_char=euler_char,
            meets_boundary_orthogonally=orthogonal,
            asym_minimal_order=asym_order,
            closed=closed,
            profile_dims=1,
            symmetry_factor=FIBER_VOLUMES[fiber_dims],
            exprs=exprs,
        )

    dom_dim = len(exprs) - 1
    if dom_dim not in (2, 4):
        raise ChartError(
            "an expression chart needs 3 or 5 coordinate expressions",
            details={"expressions": len(exprs)},
        )
    if len(domain) != dom_dim:
        raise ChartError(
            "domain needs one interval per parameter", details={"dom_dim": dom_dim}
        )
    used = max(max_param(e) for e in exprs)
    if used >= dom_dim:
        raise ChartError(
            f"expression references u{used + 1} but the chart has {dom_dim} parameters",
            details={"dom_dim": dom_dim, "parameter": used + 1},
        )
    if max_param(exprs[-1]) > 0:
        raise ChartError("the z expression may only depend on u1 (the height axis)")
    centre = tuple(0.5 * (lo + hi) for lo, hi in domain)

    def full_coordinates(u: Sequence[Any]) -> list[Any]:
        return [evaluate(e, list(u)) for e in exprs]

    return Chart(
        name=name,
        dom_dim=dom_dim,
        domain=tuple(tuple(interval) for interval in domain),  # type: ignore[misc]
        coordinates=full_coordinates,
        reference=tuple(reference) if reference else centre,
        euler_char=euler_char,
        meets_boundary_orthogonally=orthogonal,
        asym_minimal_order=asym_order,
        closed=closed,
        exprs=exprs,
    )


# ===== Boundary oracle =====


def boundary_trace_free_norm(chart: Chart, boundary_point: Sequence[float]) -> float:
    """|II°|^2 of the ideal boundary of M inside {z = 0}, from the boundary map itself.

    ``boundary_point`` lists the parameters after the height axis; the height axis is set
    to its ``hi`` end. Surfaces (dom_dim = 2) have a curve as boundary, whose trace-free
    second fundamental form vanishes identically.
    """
    if chart.dom_dim == 2:
        return 0.0
    point = np.array([chart.domain[0][1], *boundary_point], dtype=float)
    if not chart.contains(point, closed=True):
        raise ChartError("boundary point outside the chart", details={"point": point.tolist()})
    coords = coordinate_jets(chart, point, order=2)[:-1]  # x-coordinates only
    tangent_axes = range(1, chart.dom_dim)
    gradients = np.stack([c.gradient() for c in coords], axis=-1)  # (dom_dim, 2n)
    hessians = np.stack([c.hessian() for c in coords], axis=-1)
    tangents = gradients[1:]
    second = hessians[1:, 1:]
    normal = cofactor_normal(tangents[None, ...])[0]
    metric = tangents @ tangents.T
    require_full_rank(metric[None, ...])
    form = np.einsum("abk,k->ab", second, normal)
    shape = np.linalg.solve(metric, form)
    d = len(tangent_axes)
    traceless = shape - np.trace(shape) / d * np.eye(d)
    return float(np.trace(traceless @ traceless))
