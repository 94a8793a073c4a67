"""Truncated integrals over chart domains and over the z = eps level set.

Interior integrals run over [lo_0, face_parameter(eps)] on the height axis, split into
geometric panels (ratio 2) that shrink toward the face, times a single Gauss-Legendre
panel on every other profile axis. Revolution charts integrate their profile axes only and
scale by the fiber volume. Panels are evaluated on a thread pool; per-panel sums are
gathered in panel order and reduced with math.fsum, so results do not depend on the
worker count.
"""

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from ..core.config import settings
from ..core.exceptions import ChartError, QuadratureError
from ..core.validators import validate_thread_count
from ..schemas.geometry import MetricTag
from ..schemas.quadrature import IntegralReport, QuadratureSpec
from ..utils.logging import logger
from ..utils.numerics import ordered_sum, relative_error
from .chart import Chart, coordinate_jets
from .extrinsic import ExtrinsicFields, SurfaceSample, extrinsic_fields, sample_surface
from .intrinsic import (
    BoundaryFields,
    CurvatureFields,
    boundary_fields,
    curvature_fields,
    e2_from_traces,
    interior_metric_data,
    laplacian_field,
)
from .jets import Jet

MAX_BATCH = 1024
MAX_PANELS = 60


class NodeGeometry:
    """Lazily computed geometry at one batch of quadrature nodes."""

    def __init__(self, chart: Chart, points: np.ndarray):
        self.chart = chart
        self.points = points
        self._extrinsic: dict[str, ExtrinsicFields] = {}
        self._curvature: dict[str, CurvatureFields] = {}
        self._laplacian: dict[str, np.ndarray] = {}

    @cached_property
    def coords(self) -> tuple[Jet, ...]:
        return coordinate_jets(self.chart, self.points, order=3)

    @cached_property
    def sample(self) -> SurfaceSample:
        return sample_surface(self.chart, self.points, [c.truncate(2) for c in self.coords])

    @property
    def z(self) -> np.ndarray:
        return self.sample.z

    def extrinsic(self, tag: MetricTag) -> ExtrinsicFields:
        if tag not in self._extrinsic:
            self._extrinsic[tag] = extrinsic_fields(self.sample, tag)
        return self._extrinsic[tag]

    def curvature(self, tag: MetricTag) -> CurvatureFields:
        if tag not in self._curvature:
            data = interior_metric_data(self.chart, self.points, tag, self.coords)
            self._curvature[tag] = curvature_fields(data)
        return self._curvature[tag]

    def laplacian(self, tag: MetricTag) -> np.ndarray:
        if tag not in self._laplacian:
            self._laplacian[tag] = laplacian_field(self.chart, self.points, tag, "B0sq")
        return self._laplacian[tag]

    def density(self, tag: MetricTag) -> np.ndarray:
        return self.extrinsic(tag).density


# ===== Quantities =====


def _bending_order(chart: Chart) -> int:
    """k with H = O(z^k) near the ideal boundary."""
    return max(chart.asym_minimal_order, 1 if chart.meets_boundary_orthogonally else 0)


def _sigma2(geometry: NodeGeometry, tag: MetricTag) -> np.ndarray:
    sigma2P = geometry.curvature(tag).sigma2P
    if sigma2P is None:
        raise ChartError("sigma2P is defined for 4-dimensional M only")
    return sigma2P


def _e2_bform(geometry: NodeGeometry, tag: MetricTag) -> np.ndarray:
    if geometry.chart.dom_dim != 4:
        raise ChartError("the second fundamental form |E|^2 identity needs dom_dim = 4")
    f = geometry.extrinsic(tag)
    return e2_from_traces(f.H, f.B0sq, f.B0cube, f.B0quart)


@dataclass(frozen=True)
class Quantity:
    """A pointwise integrand and its vanishing order at z = 0 (hyperbolic metric)."""

    tag: str
    values: Callable[[NodeGeometry, MetricTag], np.ndarray] = field(repr=False)
    decay: Callable[[Chart], int] = field(repr=False)


INTERIOR_QUANTITIES: dict[str, Quantity] = {
    q.tag: q
    for q in (
        Quantity("one", lambda g, t: np.ones(g.points.shape[0]), lambda c: 0),
        Quantity("H2", lambda g, t: g.extrinsic(t).H ** 2, lambda c: 2 * _bending_order(c)),
        Quantity("H4", lambda g, t: g.extrinsic(t).H ** 4, lambda c: 4 * _bending_order(c)),
        Quantity(
            "H2R",
            lambda g, t: g.extrinsic(t).H ** 2 * g.extrinsic(t).R,
            lambda c: 2 * _bending_order(c) + min(2 * _bending_order(c), 2),
        ),
        Quantity(
            "H2lambda",
            lambda g, t: g.extrinsic(t).H ** 2 * g.curvature(t).lambda_,
            lambda c: 2 * _bending_order(c),
        ),
        Quantity("B0sq", lambda g, t: g.extrinsic(t).B0sq, lambda c: 2),
        Quantity("B0sq4", lambda g, t: g.extrinsic(t).B0sq ** 2, lambda c: 4),
        Quantity(
            "B0sq_plus_laplacian",
            lambda g, t: 2 * g.extrinsic(t).B0sq + g.laplacian(t),
            lambda c: 2,
        ),
        Quantity("laplacian_B0sq", lambda g, t: g.laplacian(t), lambda c: 2),
        Quantity(
            "E2",
            lambda g, t: g.curvature(t).E2,
            lambda c: min(2 * _bending_order(c) + 2, 4),
        ),
        Quantity("E2_bform", _e2_bform, lambda c: min(2 * _bending_order(c) + 2, 4)),
        Quantity("W2", lambda g, t: g.curvature(t).W2, lambda c: 4),
        Quantity("lambda", lambda g, t: g.curvature(t).lambda_, lambda c: 0),
        Quantity("K", lambda g, t: g.curvature(t).lambda_, lambda c: 0),
        Quantity("lambda2", lambda g, t: g.curvature(t).lambda_ ** 2, lambda c: 0),
        Quantity("sigma2P", _sigma2, lambda c: 0),
        Quantity(
            "chen_n",
            lambda g, t: g.extrinsic(t).chen ** g.chart.n,
            lambda c: 2 * c.n,
        ),
    )
}

BOUNDARY_QUANTITIES: tuple[str, ...] = ("kg", "S", "one", "dn_B0sq")

QuantityLike = str | Quantity


def resolve_quantity(quantity: QuantityLike) -> Quantity:
    if isinstance(quantity, Quantity):
        return quantity
    try:
        return INTERIOR_QUANTITIES[quantity]
    except KeyError:
        raise ChartError(
            f"unknown interior quantity {quantity!r}",
            details={"available": sorted(INTERIOR_QUANTITIES)},
        )


def is_integrable_at_boundary(chart: Chart, quantity: QuantityLike) -> bool:
    """Whether q dA converges up to z = 0: q z^-d is integrable iff q = O(z^d)."""
    return resolve_quantity(quantity).decay(chart) >= chart.dom_dim


# ===== Nodes =====


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(order)


def _mapped_rule(lo: float, hi: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    return lo + half * (nodes + 1.0), half * weights


def geometric_panels(lo: float, hi: float, panels: int) -> list[tuple[float, float]]:
    """Panels of [lo, hi] whose widths halve toward hi."""
    breaks = [hi - (hi - lo) * 2.0**-k for k in range(panels)] + [hi]
    return list(zip(breaks[:-1], breaks[1:], strict=True))


def _tensor_nodes(rules: Sequence[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    nodes = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    weights = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    points = np.stack([n.ravel() for n in nodes], axis=-1)
    return points, np.prod(np.stack([w.ravel() for w in weights]), axis=0)


def _transverse_rules(chart: Chart, spec: QuadratureSpec) -> list[tuple[np.ndarray, np.ndarray]]:
    assert chart.profile_dims is not None
    return [_mapped_rule(lo, hi, spec.rule) for lo, hi in chart.domain[1 : chart.profile_dims]]


def _height_rule(chart: Chart, spec: QuadratureSpec) -> int:
    return spec.profile_rule if chart.profile_dims == 1 else spec.rule


def _panel_count(chart: Chart, eps: float | None, spec: QuadratureSpec) -> int:
    """Enough geometric levels for the last panel to resolve the z^-d growth near z = eps."""
    if not eps:
        return spec.subdivision
    z_top = float(chart.height(chart.domain[0][0])[0])
    levels = math.ceil(math.log2(max(z_top / eps, 1.0)))
    return min(max(spec.subdivision, levels), MAX_PANELS)


def _chunks(points: np.ndarray, weights: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    count = max(1, math.ceil(points.shape[0] / MAX_BATCH))
    return list(
        zip(np.array_split(points, count), np.array_split(weights, count), strict=True)
    )


def _run_tasks(tasks: Sequence[Callable[[], np.ndarray]], threads: int) -> list[np.ndarray]:
    """Run tasks on a pool; results come back in submission order."""
    workers = validate_thread_count(threads) or settings.threads
    if workers == 1 or len(tasks) == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(task) for task in tasks]
        return [future.result() for future in futures]


def _symmetry_factor(chart: Chart, spec: QuadratureSpec) -> float:
    return spec.symmetry_factor if spec.symmetry_factor is not None else chart.symmetry_factor


# ===== Interior integrals =====


def _check_truncation(
    chart: Chart, quantity: Quantity, eps: float | None, metric_tag: MetricTag
) -> None:
    if eps is not None and eps < 0:
        raise QuadratureError("eps must be non-negative", details={"eps": eps})
    if metric_tag != "hyperbolic" or eps:
        return
    z_face = float(chart.height(chart.domain[0][1])[0])
    if z_face > 0 or chart.closed:
        return
    decay = quantity.decay(chart)
    if decay < chart.dom_dim:
        raise QuadratureError(
            f"divergent: {quantity.tag} dA is not integrable up to z = 0 on {chart.name}",
            details={"quantity": quantity.tag, "decay": decay, "required": chart.dom_dim},
        )


def _integrate_panels(
    chart: Chart,
    resolved: Sequence[tuple[Quantity, MetricTag]],
    face: float,
    panels: int,
    spec: QuadratureSpec,
) -> list[float]:
    transverse = _transverse_rules(chart, spec)
    height_order = _height_rule(chart, spec)

    def evaluate(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
        geometry = NodeGeometry(chart, chart.full_points(points))
        return np.array(
            [
                float(np.dot(weights, q.values(geometry, tag) * geometry.density(tag)))
                for q, tag in resolved
            ]
        )

    tasks: list[Callable[[], np.ndarray]] = []
    for a, b in geometric_panels(chart.domain[0][0], face, panels):
        points, weights = _tensor_nodes([_mapped_rule(a, b, height_order), *transverse])
        for chunk_points, chunk_weights in _chunks(points, weights):
            tasks.append(lambda p=chunk_points, w=chunk_weights: evaluate(p, w))

    partials = _run_tasks(tasks, spec.threads)
    factor = _symmetry_factor(chart, spec)
    return [factor * ordered_sum(p[k] for p in partials) for k in range(len(resolved))]


def integrate_many(
    chart: Chart,
    items: Sequence[tuple[QuantityLike, MetricTag]],
    eps: float | None,
    spec: QuadratureSpec | None = None,
) -> list[float]:
    """Integrate several (quantity, metric) pairs over M_eps on one set of nodes.

    With ``spec.check_refinement`` every integral is repeated with two more panels toward
    the face, and a relative change above ``spec.tolerance`` raises ``QuadratureError``.
    """
    spec = spec or QuadratureSpec()
    resolved = [(resolve_quantity(q), tag) for q, tag in items]
    for quantity, tag in resolved:
        _check_truncation(chart, quantity, eps, tag)

    face = chart.face_parameter(eps if eps else None)
    if not face > chart.domain[0][0]:
        raise QuadratureError("truncation is empty", details={"eps": eps, "chart": chart.name})
    panels = _panel_count(chart, eps, spec)
    totals = _integrate_panels(chart, resolved, face, panels, spec)
    logger.debug(f"{chart.name}: {len(resolved)} integrals over {panels} panels, eps={eps}")

    if spec.check_refinement:
        refined = _integrate_panels(chart, resolved, face, panels + 2, spec)
        for (quantity, tag), coarse, fine in zip(resolved, totals, refined, strict=True):
            change = relative_error(coarse, fine)
            if change > spec.tolerance:
                raise QuadratureError(
                    "quadrature did not converge under panel refinement",
                    details={
                        "quantity": quantity.tag,
                        "metric_tag": tag,
                        "eps": eps,
                        "coarse": coarse,
                        "fine": fine,
                        "relative_change": change,
                    },
                )
    return totals


def integrate_interior(
    chart: Chart,
    quantity: QuantityLike,
    eps: float | None,
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
) -> float:
    """Integral of ``quantity`` over M_eps = M ∩ {z >= eps} with dA (hyperbolic) or dA_bar."""
    return integrate_many(chart, [(quantity, metric_tag)], eps, spec)[0]


def refine_check(
    chart: Chart,
    quantity: QuantityLike,
    eps: float | None,
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
) -> float:
    """integrate_interior with the panel-refinement comparison forced on."""
    spec = (spec or QuadratureSpec()).model_copy(update={"check_refinement": True})
    return integrate_interior(chart, quantity, eps, metric_tag, spec)


# ===== Boundary integrals =====


def _boundary_values(fields: BoundaryFields, quantity: str) -> np.ndarray:
    if quantity == "one":
        return np.ones_like(fields.line_density)
    if quantity == "kg":
        if fields.kg is None:
            raise ChartError("kg is the boundary integrand of surfaces (dom_dim = 2)")
        return fields.kg
    if quantity == "S":
        if fields.S is None:
            raise ChartError("S is the boundary integrand of 4-manifolds (dom_dim = 4)")
        return fields.S
    assert fields.dn_B0sq is not None
    return fields.dn_B0sq


def integrate_boundary(
    chart: Chart,
    quantity: str,
    eps: float | None,
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
) -> float:
    """Integral of a boundary quantity over the level set z = eps with its line/area element."""
    spec = spec or QuadratureSpec()
    if quantity not in BOUNDARY_QUANTITIES:
        raise ChartError(
            f"unknown boundary quantity {quantity!r}",
            details={"available": list(BOUNDARY_QUANTITIES)},
        )
    if not eps and chart.closed:
        return 0.0
    face = chart.face_parameter(eps if eps else None)
    if chart.closed and face >= chart.domain[0][1]:
        # The level set shrank to the pole.
        return 0.0
    if metric_tag == "hyperbolic" and float(chart.height(face)[0]) <= 0:
        raise QuadratureError(
            "the hyperbolic boundary measure is infinite at z = 0",
            details={"eps": eps, "chart": chart.name},
        )

    transverse = _transverse_rules(chart, spec)
    if transverse:
        points, weights = _tensor_nodes(transverse)
    else:
        points, weights = np.zeros((1, 0)), np.ones(1)
    profile = np.concatenate([np.full((points.shape[0], 1), face), points], axis=1)

    def evaluate(p: np.ndarray, w: np.ndarray) -> np.ndarray:
        fields = boundary_fields(
            chart, chart.full_points(p), metric_tag, with_normal_derivative=quantity == "dn_B0sq"
        )
        return np.array([float(np.dot(w, _boundary_values(fields, quantity) * fields.line_density))])

    tasks = [
        (lambda p=chunk_points, w=chunk_weights: evaluate(p, w))
        for chunk_points, chunk_weights in _chunks(profile, weights)
    ]
    partials = _run_tasks(tasks, spec.threads)
    return _symmetry_factor(chart, spec) * ordered_sum(p[0] for p in partials)


# ===== Reports =====


def integral_report(
    chart: Chart,
    quantity: str,
    eps: float | None,
    metric_tag: MetricTag,
    spec: QuadratureSpec | None = None,
    boundary: bool = False,
) -> IntegralReport:
    """One integral together with the size of the rule that produced it."""
    spec = spec or QuadratureSpec()
    transverse = math.prod(len(rule[0]) for rule in _transverse_rules(chart, spec))
    if boundary:
        value = integrate_boundary(chart, quantity, eps, metric_tag, spec)
        panels, nodes = 1, transverse
        tag = quantity
    else:
        value = integrate_interior(chart, quantity, eps, metric_tag, spec)
        panels = _panel_count(chart, eps, spec)
        nodes = panels * _height_rule(chart, spec) * transverse
        tag = resolve_quantity(quantity).tag
    return IntegralReport(
        chart=chart.name,
        quantity=tag,
        metric_tag=metric_tag,
        eps=eps,
        value=value,
        boundary=boundary,
        panels=panels,
        nodes=nodes,
    )
