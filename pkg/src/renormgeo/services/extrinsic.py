"""Extrinsic geometry under the flat metric and the half-space metric g = |dx|^2 / z^2."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..core.exceptions import (
    ChartError,
    RankDeficiencyError,
    RenormGeoException,
    VerificationError,
)
from ..schemas.base import BaseReport
from ..schemas.geometry import ConformalResiduals, ExtrinsicFrame, MetricTag
from ..utils.logging import logger
from .chart import Chart, cofactor_normal, coordinate_jets, eval_chart, require_full_rank
from .jets import Jet, jet_det, jet_inverse, power

CONFORMAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SurfaceSample:
    """First and second fundamental forms at a batch of parameter points."""

    points: np.ndarray  # (N, d)
    position: np.ndarray  # (N, m)
    tangents: np.ndarray  # (N, d, m)
    normal: np.ndarray  # (N, m), oriented unit Euclidean normal
    g_euc: np.ndarray  # (N, d, d)
    B_euc: np.ndarray
    g_hyp: np.ndarray
    B_hyp: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.position[:, -1]

    @property
    def xi_z(self) -> np.ndarray:
        return self.normal[:, -1]

    def metric(self, tag: MetricTag) -> np.ndarray:
        return self.g_hyp if tag == "hyperbolic" else self.g_euc

    def form(self, tag: MetricTag) -> np.ndarray:
        return self.B_hyp if tag == "hyperbolic" else self.B_euc


@dataclass(frozen=True)
class ExtrinsicFields:
    """Scalar invariants of the shape operator, one value per sample point."""

    H: np.ndarray
    R: np.ndarray
    B2: np.ndarray
    B0sq: np.ndarray
    B0cube: np.ndarray
    B0quart: np.ndarray
    density: np.ndarray

    @property
    def chen(self) -> np.ndarray:
        """H^2 - R."""
        return self.H**2 - self.R


def halfspace_christoffel(u: np.ndarray, v: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Gamma(u, v) of the metric |dx|^2 / z^2; the last coordinate is z."""
    u_z = u[..., -1:]
    v_z = v[..., -1:]
    inner = np.sum(u * v, axis=-1, keepdims=True)
    vertical = np.zeros(u.shape[-1])
    vertical[-1] = 1.0
    height = z.reshape(z.shape + (1,) * (max(u.ndim, v.ndim) - z.ndim))
    return -(u * v_z + v * u_z - inner * vertical) / height


def sample_surface(
    chart: Chart, points: np.ndarray, coords: Sequence[Jet] | None = None
) -> SurfaceSample:
    """Fundamental forms at parameter points (shape (N, d)) from order-2 jets."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if coords is None:
        coords = coordinate_jets(chart, points, order=2)

    position = np.stack([c.value for c in coords], axis=-1)
    tangents = np.moveaxis(np.stack([c.gradient() for c in coords], axis=-1), 1, 0)
    second = np.moveaxis(np.stack([c.hessian() for c in coords], axis=-1), 2, 0)

    z = position[:, -1]
    if np.any(z <= 0):
        raise ChartError(
            f"chart {chart.name} leaves the half-space z > 0",
            details={"min_z": float(np.min(z))},
        )

    normal = chart.orientation * cofactor_normal(tangents)
    g_euc = np.einsum("nik,njk->nij", tangents, tangents)
    require_full_rank(g_euc)
    B_euc = np.einsum("nijk,nk->nij", second, normal)

    # Hyperbolic form from the ambient connection, with unit normal z * normal.
    gamma = halfspace_christoffel(tangents[:, :, None, :], tangents[:, None, :, :], z)
    B_hyp = np.einsum("nijk,nk->nij", second + gamma, normal) / z[:, None, None]
    g_hyp = g_euc / z[:, None, None] ** 2

    return SurfaceSample(
        points=points,
        position=position,
        tangents=tangents,
        normal=normal,
        g_euc=g_euc,
        B_euc=B_euc,
        g_hyp=g_hyp,
        B_hyp=B_hyp,
    )


def extrinsic_fields(sample: SurfaceSample, tag: MetricTag) -> ExtrinsicFields:
    """H, R, |B|^2, |B°|^2 and friends from traces of S = g^-1 B (no eigen-solve)."""
    g = sample.metric(tag)
    shape = np.linalg.solve(g, sample.form(tag))
    d = shape.shape[-1]
    trace = np.trace(shape, axis1=-2, axis2=-1)
    H = trace / d
    B2 = np.einsum("nij,nji->n", shape, shape)
    traceless = shape - H[:, None, None] * np.eye(d)
    square = traceless @ traceless
    return ExtrinsicFields(
        H=H,
        R=(trace**2 - B2) / (d * (d - 1)),
        B2=B2,
        B0sq=np.trace(square, axis1=-2, axis2=-1),
        B0cube=np.einsum("nij,nji->n", square, traceless),
        B0quart=np.einsum("nij,nji->n", square, square),
        density=np.sqrt(np.linalg.det(g)),
    )


# ===== Jet-valued forms (for derivatives of curvature fields) =====


def _dot(u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    return sum((a * b for a, b in zip(u, v, strict=True)), start=0.0)  # type: ignore[return-value]


def metric_jets(chart: Chart, coords: Sequence[Jet], tag: MetricTag) -> list[list[Jet]]:
    """Induced metric as jets, one order below the coordinates."""
    d = chart.dom_dim
    tangents = [[c.derivative(i) for c in coords] for i in range(d)]
    g = [[_dot(tangents[i], tangents[j]) for j in range(d)] for i in range(d)]
    if tag == "euclidean":
        return g
    inv_z2 = power(coords[-1].truncate(coords[0].order - 1), -2)
    return [[g[i][j] * inv_z2 for j in range(d)] for i in range(d)]


def fundamental_form_jets(
    chart: Chart, coords: Sequence[Jet], tag: MetricTag
) -> tuple[list[list[Jet]], list[list[Jet]]]:
    """Metric and second fundamental form as jets, two orders below the coordinates."""
    d = chart.dom_dim
    order = coords[0].order - 2
    if order < 0:
        raise ChartError("fundamental-form jets need coordinates of order >= 2")
    first = [[c.derivative(i) for c in coords] for i in range(d)]
    second = [[[t.derivative(j) for t in first[i]] for j in range(d)] for i in range(d)]
    tangents = [[t.truncate(order) for t in row] for row in first]
    g = [[_dot(tangents[i], tangents[j]) for j in range(d)] for i in range(d)]

    columns = range(d + 1)
    raw = []
    for k in columns:
        minor = [[row[c] for c in columns if c != k] for row in tangents]
        det = jet_det(minor)
        raw.append(det if k % 2 == 0 else -det)
    scale = power(_dot(raw, raw), -0.5) * float(chart.orientation)
    normal = [c * scale for c in raw]

    B = [[_dot(second[i][j], normal) for j in range(d)] for i in range(d)]
    if tag == "euclidean":
        return g, B

    inv_z = power(coords[-1].truncate(order), -1)
    xi_z = normal[-1]
    along = [_dot(tangents[i], normal) for i in range(d)]
    g_hyp = [[g[i][j] * inv_z * inv_z for j in range(d)] for i in range(d)]
    B_hyp = []
    for i in range(d):
        row = []
        for j in range(d):
            gamma = -(along[i] * tangents[j][-1] + along[j] * tangents[i][-1] - g[i][j] * xi_z)
            row.append((B[i][j] + gamma * inv_z) * inv_z)
        B_hyp.append(row)
    return g_hyp, B_hyp


def trace_free_norm_jet(g: list[list[Jet]], B: list[list[Jet]]) -> Jet:
    """|B°|^2 = tr(S^2) - tr(S)^2 / d as a jet, with S = g^-1 B."""
    d = len(g)
    inverse, _ = jet_inverse(g)
    shape = [[_dot(inverse[i], [B[k][j] for k in range(d)]) for j in range(d)] for i in range(d)]
    trace = _dot([shape[i][i] for i in range(d)], [1.0] * d)  # type: ignore[list-item]
    square = _dot(
        [shape[i][j] for i in range(d) for j in range(d)],
        [shape[j][i] for i in range(d) for j in range(d)],
    )
    return square - trace * trace * (1.0 / d)


# ===== Single-point frame =====


def extrinsic_frame(chart: Chart, point: Sequence[float]) -> ExtrinsicFrame:
    """Every extrinsic quantity at one interior point, under both metrics."""
    point = np.asarray(point, dtype=float)
    coords = eval_chart(chart, point, order=2)
    sample = sample_surface(chart, point[None, :], [_as_batch(c) for c in coords])
    values = {}
    for tag, suffix in (("euclidean", "euc"), ("hyperbolic", "hyp")):
        fields = extrinsic_fields(sample, tag)  # type: ignore[arg-type]
        try:
            kappas = scipy.linalg.eigh(
                sample.form(tag)[0], sample.metric(tag)[0], eigvals_only=True  # type: ignore[arg-type]
            )
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError(
                "generalized eigen-solve failed", details={"point": point.tolist(), "error": str(exc)}
            )
        values.update(
            {
                f"kappas_{suffix}": np.sort(kappas).tolist(),
                f"H_{suffix}": float(fields.H[0]),
                f"R_{suffix}": float(fields.R[0]),
                f"B2_{suffix}": float(fields.B2[0]),
                f"B0sq_{suffix}": float(fields.B0sq[0]),
                f"area_density_{suffix}": float(fields.density[0]),
            }
        )
    return ExtrinsicFrame(
        parameters=point.tolist(),
        point=sample.position[0].tolist(),
        z=float(sample.z[0]),
        orientation=chart.orientation,
        g_euc=sample.g_euc[0].tolist(),
        g_hyp=sample.g_hyp[0].tolist(),
        normal_euc=sample.normal[0].tolist(),
        xi_z=float(sample.xi_z[0]),
        B_euc=sample.B_euc[0].tolist(),
        B_hyp=sample.B_hyp[0].tolist(),
        **values,
    )


def _as_batch(jet: Jet) -> Jet:
    return Jet(jet.coeffs[..., None], jet.num_vars, jet.order)


def flip_orientation(frame: ExtrinsicFrame) -> ExtrinsicFrame:
    """The same frame for the opposite unit normal."""
    return frame.model_copy(
        update={
            "orientation": -frame.orientation,
            "normal_euc": [-x for x in frame.normal_euc],
            "xi_z": -frame.xi_z,
            "B_euc": [[-x for x in row] for row in frame.B_euc],
            "B_hyp": [[-x for x in row] for row in frame.B_hyp],
            "kappas_euc": sorted(-k for k in frame.kappas_euc),
            "kappas_hyp": sorted(-k for k in frame.kappas_hyp),
            "H_euc": -frame.H_euc,
            "H_hyp": -frame.H_hyp,
        }
    )


def conformal_relations_check(frame: ExtrinsicFrame) -> ConformalResiduals:
    """Residuals of kappa = z kappa_bar + xi_z and the induced H and R relations."""
    z, xi_z = frame.z, frame.xi_z
    predicted = z * np.asarray(frame.kappas_euc) + xi_z
    kappa = (np.asarray(frame.kappas_hyp) - predicted).tolist()
    H = frame.H_hyp - (z * frame.H_euc + xi_z)
    R = frame.R_hyp - (z * z * frame.R_euc + 2 * z * xi_z * frame.H_euc + xi_z * xi_z)
    max_abs = max([abs(H), abs(R), *(abs(k) for k in kappa)])
    return ConformalResiduals(
        success=max_abs <= CONFORMAL_TOLERANCE, kappa=kappa, H=H, R=R, max_abs=max_abs
    )


def chen_invariant(frame: ExtrinsicFrame) -> float:
    """H^2 - R on the hyperbolic side, checked against |B°|^2/(d(d-1)) and z^2 (H_bar^2 - R_bar)."""
    d = len(frame.kappas_hyp)
    hyperbolic = frame.H_hyp**2 - frame.R_hyp
    trace_free = frame.B0sq_hyp / (d * (d - 1))
    euclidean = frame.z**2 * (frame.H_euc**2 - frame.R_euc)
    scale = max(1.0, abs(hyperbolic))
    for label, other in (("trace-free", trace_free), ("euclidean", euclidean)):
        if abs(hyperbolic - other) > CONFORMAL_TOLERANCE * scale:
            raise VerificationError(
                f"Chen invariant mismatch ({label} side)",
                details={"hyperbolic": hyperbolic, label: other},
            )
    return hyperbolic


# ===== Batched pointwise identities =====


def principal_curvatures(sample: SurfaceSample, tag: MetricTag) -> np.ndarray:
    """Eigenvalues of B relative to g at every sample point, ascending, shape (N, d)."""
    try:
        lower_inv = np.linalg.inv(np.linalg.cholesky(sample.metric(tag)))
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(
            "induced metric is not positive definite", details={"error": str(exc)}
        )
    symmetric = lower_inv @ sample.form(tag) @ np.swapaxes(lower_inv, -1, -2)
    return np.linalg.eigvalsh(symmetric)


def conformal_residuals(sample: SurfaceSample) -> np.ndarray:
    """Per-point max of the kappa, H and R conformal-change residuals."""
    z = sample.z
    xi_z = sample.xi_z
    euc = extrinsic_fields(sample, "euclidean")
    hyp = extrinsic_fields(sample, "hyperbolic")
    # z > 0 keeps the ascending order of both spectra aligned.
    kappa = principal_curvatures(sample, "hyperbolic") - (
        z[:, None] * principal_curvatures(sample, "euclidean") + xi_z[:, None]
    )
    H = hyp.H - (z * euc.H + xi_z)
    R = hyp.R - (z * z * euc.R + 2 * z * xi_z * euc.H + xi_z * xi_z)
    return np.maximum(np.max(np.abs(kappa), axis=-1), np.maximum(np.abs(H), np.abs(R)))


def chen_residuals(sample: SurfaceSample) -> np.ndarray:
    """Relative gap between H^2 - R, |B°|^2/(d(d-1)) and z^2 (H_bar^2 - R_bar), per point."""
    d = sample.g_euc.shape[-1]
    hyp = extrinsic_fields(sample, "hyperbolic")
    euc = extrinsic_fields(sample, "euclidean")
    scale = np.maximum(1.0, np.abs(hyp.chen))
    trace_free = np.abs(hyp.chen - hyp.B0sq / (d * (d - 1)))
    euclidean = np.abs(hyp.chen - sample.z**2 * euc.chen)
    return np.maximum(trace_free, euclidean) / scale


# ===== Boundary behaviour checks =====


class BoundaryBehaviour(BaseReport):
    """Ratios |f|/z^k sampled on a shrinking sequence of heights."""

    quantity: str
    power: int
    heights: list[float]
    ratios: list[float]
    bounded: bool


def _near_face_points(chart: Chart, heights: Sequence[float], per_axis: int = 5) -> list[np.ndarray]:
    assert chart.profile_dims is not None
    transverse_axes = [
        (lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis)
        for lo, hi in chart.domain[1 : chart.profile_dims]
    ]
    mesh = np.meshgrid(*transverse_axes, indexing="ij") if transverse_axes else []
    transverse = np.stack([m.ravel() for m in mesh], axis=-1) if mesh else np.zeros((1, 0))
    batches = []
    for eps in heights:
        t = chart.face_parameter(eps)
        profile = np.concatenate([np.full((transverse.shape[0], 1), t), transverse], axis=1)
        batches.append(chart.full_points(profile))
    return batches


def _boundary_ratios(chart: Chart, quantity: str, power_: int, heights: Sequence[float]) -> BoundaryBehaviour:
    ratios = []
    for batch in _near_face_points(chart, heights):
        sample = sample_surface(chart, batch)
        if quantity == "xi_z":
            values = sample.xi_z
        else:
            values = extrinsic_fields(sample, "hyperbolic").H
        ratios.append(float(np.max(np.abs(values) / sample.z**power_)))
    # A finite limit keeps the ratio from growing as z halves.
    bounded = ratios[-1] <= 2.0 * ratios[0] + 1e-8
    logger.debug(f"{chart.name}: |{quantity}|/z^{power_} ratios {ratios}")
    return BoundaryBehaviour(
        success=bounded,
        quantity=quantity,
        power=power_,
        heights=list(heights),
        ratios=ratios,
        bounded=bounded,
    )


def check_orthogonality(chart: Chart, heights: Sequence[float] | None = None) -> BoundaryBehaviour:
    """|xi_z| / z stays bounded near z = 0 iff M meets the ideal boundary at a right angle."""
    heights = heights or [1e-2 * 2.0**-k for k in range(6)]
    return _boundary_ratios(chart, "xi_z", 1, heights)


def check_asym_minimality(
    chart: Chart, order: int | None = None, heights: Sequence[float] | None = None
) -> BoundaryBehaviour:
    """|H| / z^k stays bounded near z = 0 for an asymptotically minimal chart of order k."""
    heights = heights or [1e-2 * 2.0**-k for k in range(6)]
    return _boundary_ratios(chart, "H", chart.asym_minimal_order if order is None else order, heights)


def require_declared_asymptotics(
    chart: Chart, error: type[RenormGeoException] = ChartError
) -> None:
    """Sample the boundary behaviour a chart declares and raise ``error`` if it does not hold."""
    if chart.closed:
        return
    if chart.meets_boundary_orthogonally:
        report = check_orthogonality(chart)
        if not report.bounded:
            raise error(
                f"{chart.name} is declared orthogonal but |xi_z|/z grows toward z = 0",
                details={"heights": report.heights, "ratios": report.ratios},
            )
    if chart.asym_minimal_order > 0:
        report = check_asym_minimality(chart)
        if not report.bounded:
            raise error(
                f"{chart.name} is declared asymptotically minimal of order "
                f"{chart.asym_minimal_order} but |H| / z^k grows toward z = 0",
                details={
                    "asym_minimal_order": chart.asym_minimal_order,
                    "heights": report.heights,
                    "ratios": report.ratios,
                },
            )
