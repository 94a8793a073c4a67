"""Intrinsic curvature of the induced metric and the boundary S-curvature.

Riemann tensor convention: R_ijij = K (g_ii g_jj - g_ij^2), i.e. positive on round spheres,
and Ric_bd = sum_a Rm_abad. The scalar curvature is normalized as
lambda = scal / (d (d - 1)), the average of the sectional curvatures.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..core.exceptions import ChartError, RankDeficiencyError
from ..schemas.geometry import BoundaryFrame, ExtrinsicFrame, IntrinsicFrame, MetricTag
from .chart import Chart, coordinate_jets, eval_chart
from .expr import evaluate, parse_expr
from .extrinsic import (
    chen_residuals,
    conformal_residuals,
    extrinsic_fields,
    fundamental_form_jets,
    metric_jets,
    sample_surface,
    trace_free_norm_jet,
)
from .jets import Jet, jet_inverse, jet_variables, power

AMBIENT_CURVATURE: dict[str, float] = {"euclidean": 0.0, "hyperbolic": -1.0}


@dataclass(frozen=True)
class MetricData:
    """Metric with first and second coordinate derivatives at a batch of points."""

    g: np.ndarray  # (N, d, d)
    dg: np.ndarray  # (N, k, i, j) = d_k g_ij
    ddg: np.ndarray  # (N, k, l, i, j) = d_k d_l g_ij

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    def christoffel_first(self) -> np.ndarray:
        """Gamma_{k,ij} = (d_i g_jk + d_j g_ik - d_k g_ij) / 2, shape (N, k, i, j)."""
        dg = self.dg
        return 0.5 * (np.einsum("nijk->nkij", dg) + np.einsum("njik->nkij", dg) - dg)


@dataclass(frozen=True)
class CurvatureFields:
    """Ricci decomposition in an orthonormal frame, per sample point."""

    riemann: np.ndarray  # (N, d, d, d, d) frame components
    ricci: np.ndarray  # (N, d, d)
    scalar: np.ndarray
    lambda_: np.ndarray
    E2: np.ndarray
    W2: np.ndarray
    sigma2P: np.ndarray | None


def metric_data(g_jets: list[list[Jet]]) -> MetricData:
    """Values, gradients and Hessians of a jet-valued metric (order >= 2)."""
    d = len(g_jets)
    if g_jets[0][0].order < 2:
        raise ChartError("curvature needs metric jets of order >= 2")
    g = np.stack([np.stack([g_jets[i][j].value for j in range(d)], -1) for i in range(d)], -2)
    dg = np.stack(
        [np.stack([g_jets[i][j].gradient() for j in range(d)], -1) for i in range(d)], -2
    )
    ddg = np.stack(
        [np.stack([g_jets[i][j].hessian() for j in range(d)], -1) for i in range(d)], -2
    )
    return MetricData(g=g, dg=np.moveaxis(dg, 0, 1), ddg=np.moveaxis(ddg, (0, 1), (1, 2)))


def coordinate_riemann(data: MetricData) -> np.ndarray:
    """R_ijkl in coordinates, shape (N, d, d, d, d)."""
    ddg = data.ddg
    linear = 0.5 * (
        np.einsum("njkil->nijkl", ddg)
        + np.einsum("niljk->nijkl", ddg)
        - np.einsum("nikjl->nijkl", ddg)
        - np.einsum("njlik->nijkl", ddg)
    )
    lowered = data.christoffel_first()
    raised = np.einsum("nmk,nkij->nmij", data.inverse, lowered)
    quadratic = np.einsum("npjk,npil->nijkl", lowered, raised) - np.einsum(
        "npjl,npik->nijkl", lowered, raised
    )
    return linear + quadratic


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns e_a with g(e_a, e_b) = delta_ab (Gram-Schmidt in axis order, via Cholesky)."""
    try:
        lower = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError("metric is not positive definite", details={"error": str(exc)})
    return np.swapaxes(np.linalg.inv(lower), -1, -2)


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h o k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad."""
    return (
        np.einsum("nac,nbd->nabcd", h, k)
        + np.einsum("nbd,nac->nabcd", h, k)
        - np.einsum("nad,nbc->nabcd", h, k)
        - np.einsum("nbc,nad->nabcd", h, k)
    )


def curvature_fields(data: MetricData) -> CurvatureFields:
    """Riemann, Ricci, lambda, |E|^2, |W|^2 and 2 sigma_2(P) in an orthonormal frame."""
    frame = orthonormal_frame(data.g)
    coordinate = coordinate_riemann(data)
    riemann = np.einsum(
        "nijkl,nia,njb,nkc,nld->nabcd", coordinate, frame, frame, frame, frame, optimize=True
    )
    d = data.g.shape[-1]
    ricci = np.einsum("nabad->nbd", riemann)
    scalar = np.trace(ricci, axis1=-2, axis2=-1)
    identity = np.broadcast_to(np.eye(d), ricci.shape)
    traceless = ricci - scalar[:, None, None] / d * identity
    E2 = np.einsum("nab,nab->n", traceless, traceless)

    if d > 2:
        constant_part = scalar / (2 * d * (d - 1))
        weyl = (
            riemann
            - kulkarni_nomizu(traceless, identity) / (d - 2)
            - constant_part[:, None, None, None, None] * kulkarni_nomizu(identity, identity)
        )
        W2 = np.einsum("nabcd,nabcd->n", weyl, weyl)
    else:
        W2 = np.zeros_like(scalar)

    sigma2P = None
    if d == 4:
        # 2 sigma_2 of the Schouten tensor: (tr P)^2 - |P|^2.
        schouten = (ricci - scalar[:, None, None] / (2 * (d - 1)) * identity) / (d - 2)
        trace_p = np.trace(schouten, axis1=-2, axis2=-1)
        sigma2P = trace_p**2 - np.einsum("nab,nab->n", schouten, schouten)

    return CurvatureFields(
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
        lambda_=scalar / (d * (d - 1)),
        E2=E2,
        W2=W2,
        sigma2P=sigma2P,
    )


def riemann_symmetry_residual(riemann: np.ndarray) -> np.ndarray:
    """Largest violation of the pair symmetries and the first Bianchi identity."""
    residuals = [
        riemann + np.einsum("nabcd->nbacd", riemann),
        riemann + np.einsum("nabcd->nabdc", riemann),
        riemann - np.einsum("nabcd->ncdab", riemann),
        riemann + np.einsum("nabcd->nacdb", riemann) + np.einsum("nabcd->nadbc", riemann),
    ]
    stacked = np.abs(np.stack(residuals)).reshape(4, riemann.shape[0], -1)
    return np.max(stacked, axis=(0, 2))


def interior_metric_data(
    chart: Chart, points: np.ndarray, tag: MetricTag, coords: Sequence[Jet] | None = None
) -> MetricData:
    """Metric data at parameter points from order-3 coordinate jets."""
    if coords is None:
        coords = coordinate_jets(chart, np.atleast_2d(points), order=3)
    g_jets = metric_jets(chart, [c.truncate(3) for c in coords], tag)
    return metric_data(g_jets)


def pointwise_identity_residuals(chart: Chart, points: np.ndarray) -> dict[str, np.ndarray]:
    """Residuals of the pointwise curvature identities at a batch of interior points.

    ``conformal`` and ``chen`` compare the two metrics on the extrinsic side, ``gauss`` is the
    Gauss equation lambda = R - 1 in H^{n+1}. For 4-manifolds ``e2`` compares the intrinsic
    |E|^2 with its shape-operator form and ``weyl`` checks |W|^2 = z^4 |W_bar|^2.
    The last two are relative to max(1, |value|).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    coords = coordinate_jets(chart, points, order=3)
    sample = sample_surface(chart, points, [c.truncate(2) for c in coords])
    hyp = extrinsic_fields(sample, "hyperbolic")
    fields = curvature_fields(interior_metric_data(chart, points, "hyperbolic", coords))
    residuals = {
        "conformal": conformal_residuals(sample),
        "chen": chen_residuals(sample),
        "gauss": np.abs(fields.lambda_ - hyp.R - AMBIENT_CURVATURE["hyperbolic"]),
    }
    if chart.dom_dim == 4:
        e2 = e2_from_traces(hyp.H, hyp.B0sq, hyp.B0cube, hyp.B0quart)
        residuals["e2"] = np.abs(e2 - fields.E2) / np.maximum(np.abs(fields.E2), 1.0)
        flat = curvature_fields(interior_metric_data(chart, points, "euclidean", coords))
        residuals["weyl"] = np.abs(fields.W2 - sample.z**4 * flat.W2) / np.maximum(
            np.abs(fields.W2), 1.0
        )
    return residuals


# ===== Single-point frame =====


def intrinsic_frame(
    chart: Chart, point: Sequence[float], metric_tag: MetricTag
) -> IntrinsicFrame:
    """Intrinsic curvature of the induced metric at one interior point."""
    point = np.asarray(point, dtype=float)
    eval_chart(chart, point, order=0)
    points = point[None, :]
    fields = curvature_fields(interior_metric_data(chart, points, metric_tag))
    extrinsic = extrinsic_fields(sample_surface(chart, points), metric_tag)
    gauss = fields.lambda_ - extrinsic.R - AMBIENT_CURVATURE[metric_tag]
    return IntrinsicFrame(
        metric_tag=metric_tag,
        riemann=fields.riemann[0].tolist(),
        ricci=fields.ricci[0].tolist(),
        scalar=float(fields.scalar[0]),
        lambda_=float(fields.lambda_[0]),
        E2=float(fields.E2[0]),
        W2=float(fields.W2[0]),
        sigma2P=None if fields.sigma2P is None else float(fields.sigma2P[0]),
        gauss_residual=float(gauss[0]),
        symmetry_residual=float(riemann_symmetry_residual(fields.riemann)[0]),
    )


# ===== Boundary of the truncation =====


@dataclass(frozen=True)
class BoundaryFields:
    """S-curvature ingredients of the level set u_0 = const, per sample point."""

    L: np.ndarray  # (N, d-1, d-1), orthonormal tangent frame
    h: np.ndarray
    lambda_: np.ndarray
    ric_nu_nu: np.ndarray
    mixed_term: np.ndarray
    S: np.ndarray | None
    kg: np.ndarray | None
    line_density: np.ndarray
    dn_B0sq: np.ndarray | None


def s_curvature(
    L: np.ndarray, lambda_: np.ndarray, ric_nu_nu: np.ndarray, mixed: np.ndarray
) -> np.ndarray:
    """S = 6 lambda h - Ric(nu,nu) h - mixed + h^3/3 - h |L|^2 + (2/3) tr L^3, batched."""
    L = np.asarray(L, dtype=float)
    h = np.trace(L, axis1=-2, axis2=-1)
    L2 = np.einsum("...ab,...ab->...", L, L)
    L3 = np.einsum("...ab,...bc,...ca->...", L, L, L)
    return 6 * lambda_ * h - ric_nu_nu * h - mixed + h**3 / 3 - h * L2 + (2.0 / 3.0) * L3


def boundary_fields(
    chart: Chart, points: np.ndarray, tag: MetricTag, with_normal_derivative: bool = False
) -> BoundaryFields:
    """Geometry of the level sets of the height axis through ``points`` (shape (N, d)).

    nu is the inward unit normal (towards decreasing u_0, i.e. into the truncation) and L
    is taken with respect to it, so L = +I on the boundary of a unit ball.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = chart.dom_dim
    coords = coordinate_jets(chart, points, order=3)
    data = metric_data(metric_jets(chart, coords, tag))
    inverse = data.inverse

    if np.any(inverse[:, 0, 0] <= 0):
        raise ChartError("level set is not transverse to the chart", details={"chart": chart.name})
    nu = -inverse[:, 0, :] / np.sqrt(inverse[:, 0, 0])[:, None]

    form = np.einsum("nlab,nl->nab", data.christoffel_first(), nu)[:, 1:, 1:]
    tangent_metric = data.g[:, 1:, 1:]
    tangent_frame = orthonormal_frame(tangent_metric)
    L = np.einsum("nia,nij,njb->nab", tangent_frame, form, tangent_frame)

    coordinate = coordinate_riemann(data)
    ricci = np.einsum("nik,nijkl->njl", inverse, coordinate)
    lambda_ = np.einsum("njl,njl->n", inverse, ricci) / (d * (d - 1))
    ric_nu_nu = np.einsum("nj,njl,nl->n", nu, ricci, nu)

    vectors = np.zeros((points.shape[0], d, d - 1))
    vectors[:, 1:, :] = tangent_frame
    tangential = np.einsum(
        "nijkl,nia,njb,nkc,nle->nabce",
        coordinate,
        vectors,
        vectors,
        vectors,
        vectors,
        optimize=True,
    )
    mixed = np.einsum("nabac,nbc->n", tangential, L)

    S = kg = None
    if d == 4:
        S = s_curvature(L, lambda_, ric_nu_nu, mixed)
    else:
        kg = L[:, 0, 0]

    dn_B0sq = None
    if with_normal_derivative:
        g_jets, B_jets = fundamental_form_jets(chart, coords, tag)
        f = trace_free_norm_jet(g_jets, B_jets)
        # Outward conormal eta = -nu.
        dn_B0sq = np.einsum("nl,ln->n", -nu, f.gradient())

    return BoundaryFields(
        L=L,
        h=np.trace(L, axis1=-2, axis2=-1),
        lambda_=lambda_,
        ric_nu_nu=ric_nu_nu,
        mixed_term=mixed,
        S=S,
        kg=kg,
        line_density=np.sqrt(np.linalg.det(tangent_metric)),
        dn_B0sq=dn_B0sq,
    )


def boundary_frame(
    chart: Chart, boundary_point: Sequence[float], eps: float | None, metric_tag: MetricTag
) -> BoundaryFrame:
    """Boundary frame of the truncation z >= eps at a point of its level set."""
    point = np.asarray(boundary_point, dtype=float)
    face = chart.face_parameter(eps)
    if abs(point[0] - face) > 1e-9 * max(1.0, abs(face)):
        raise ChartError(
            "boundary point is not on the level set z = eps",
            details={"eps": eps, "face_parameter": face, "point": point.tolist()},
        )
    if not chart.contains(point, closed=True):
        raise ChartError("boundary point outside the chart", details={"point": point.tolist()})
    fields = boundary_fields(chart, point[None, :], metric_tag)
    return BoundaryFrame(
        metric_tag=metric_tag,
        L=fields.L[0].tolist(),
        h=float(fields.h[0]),
        ric_nu_nu=float(fields.ric_nu_nu[0]),
        mixed_term=float(fields.mixed_term[0]),
        S=None if fields.S is None else float(fields.S[0]),
        kg=None if fields.kg is None else float(fields.kg[0]),
        line_density=float(fields.line_density[0]),
    )


# ===== Laplace-Beltrami =====


def laplacian_values(g_jets: list[list[Jet]], field: Jet) -> np.ndarray:
    """(1/sqrt g) d_i (sqrt g g^ij d_j f) from jets of g (order >= 1) and f (order >= 2)."""
    d = len(g_jets)
    inverse, det = jet_inverse([[g.truncate(1) for g in row] for row in g_jets])
    root = power(det, 0.5)
    gradient = [field.derivative(j) for j in range(d)]
    divergence: Any = 0.0
    for i in range(d):
        flux = sum((inverse[i][j] * gradient[j] for j in range(d)), start=0.0) * root
        divergence = divergence + flux.derivative(i).value  # type: ignore[union-attr]
    return np.asarray(divergence) / root.value


def laplacian_field(
    chart: Chart, points: np.ndarray, tag: MetricTag, field: str = "B0sq"
) -> np.ndarray:
    """Delta_g of a scalar field at parameter points (N, d).

    ``field`` is ``B0sq`` (|B°|^2 of the chosen metric), ``one``, or an expression in the
    chart parameters u1..u4.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if field == "one":
        return np.zeros(points.shape[0])
    coords = coordinate_jets(chart, points, order=4)
    g_jets, B_jets = fundamental_form_jets(chart, coords, tag)
    if field == "B0sq":
        f = trace_free_norm_jet(g_jets, B_jets)
    else:
        f = evaluate(parse_expr(field), list(jet_variables(points, 2)))
        if not isinstance(f, Jet):
            return np.zeros(points.shape[0])
    return laplacian_values(g_jets, f)


def laplace_beltrami(
    chart: Chart, field: str, point: Sequence[float], metric_tag: MetricTag
) -> float:
    """Laplace-Beltrami of a scalar field at one interior point, all derivatives from jets."""
    point = np.asarray(point, dtype=float)
    eval_chart(chart, point, order=0)
    return float(laplacian_field(chart, point[None, :], metric_tag, field)[0])


# ===== |E|^2 from the shape operator =====


def e2_from_traces(
    H: np.ndarray, B0sq: np.ndarray, B0cube: np.ndarray, B0quart: np.ndarray
) -> np.ndarray:
    """|E|^2 = |B°^2|^2 - 4H tr(B°^3) + 4H^2 |B°|^2 - |B°|^4 / 4 (4-dimensional M)."""
    return B0quart - 4 * H * B0cube + 4 * H**2 * B0sq - B0sq**2 / 4


def e2_via_bform(frame: ExtrinsicFrame, metric_tag: MetricTag = "hyperbolic") -> float:
    """|E|^2 built purely from the trace-free shape operator of the frame."""
    kappas = np.asarray(frame.kappas_hyp if metric_tag == "hyperbolic" else frame.kappas_euc)
    if kappas.size != 4:
        raise ChartError(
            "the |E|^2 identity holds for 4-dimensional M", details={"dim": int(kappas.size)}
        )
    H = float(np.mean(kappas))
    dev = kappas - H
    return float(
        e2_from_traces(
            np.asarray(H), np.sum(dev**2), np.sum(dev**3), np.sum(dev**4)
        )
    )
