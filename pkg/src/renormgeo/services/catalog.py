"""Builtin analytic surfaces and surface-spec loading."""

import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from urllib.parse import parse_qsl

import numpy as np

from ..core.exceptions import ChartError
from ..core.validators import validate_config_keys
from ..schemas.geometry import SurfaceSpec
from ..utils.logging import logger
from ..utils.numerics import gcos, gsin, gsqrt
from .chart import (
    FIBER_DOMAINS,
    FIBER_POINTS,
    FIBER_VOLUMES,
    Chart,
    expression_chart,
    sphere2,
    sweep_profile,
)
from .expr import parse_expr
from .extrinsic import require_declared_asymptotics


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    summary: str
    params: dict[str, tuple[float, str]]
    build: Callable[..., Chart]


def _arccos_face(scale: float, offset: float = 0.0) -> Callable[[float], float]:
    """Face parameter for z = offset + scale * cos(t), clamped to the domain."""

    def face(eps: float) -> float:
        ratio = (eps - offset) / scale
        if ratio >= 1.0:
            raise ChartError(
                "truncation is empty", details={"eps": eps, "z_max": offset + scale}
            )
        return math.acos(max(ratio, -1.0))

    return face


def _zero_b2(s: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(s, dtype=float))


# ===== H^3 families =====


def geodesic_hemisphere(a: float = 1.0) -> Chart:
    """Euclidean hemisphere of radius a centred on {z = 0}; totally geodesic in H^3."""
    if a <= 0:
        raise ChartError("radius must be positive", details={"a": a})

    def coordinates(u: Sequence[Any]) -> list[Any]:
        t, psi = u
        return sweep_profile(a * gsin(t), a * gcos(t), [psi])

    return Chart(
        name=f"geodesic_hemisphere(a={a:g})",
        dom_dim=2,
        domain=((0.0, math.pi / 2), *FIBER_DOMAINS[1]),
        coordinates=coordinates,
        reference=(math.pi / 4, *FIBER_POINTS[1]),
        symmetry="revolution",
        euler_char=1,
        meets_boundary_orthogonally=True,
        asym_minimal_order=2,
        profile_dims=1,
        symmetry_factor=FIBER_VOLUMES[1],
        builtin="geodesic_hemisphere",
        params={"a": a},
        face=_arccos_face(a),
        boundary_b2=_zero_b2,
    )


def perturbed_hemisphere(a: float = 1.0, delta: float = 0.05, k: float = 2) -> Chart:
    """Hemisphere whose horizontal radius carries a cos(k phi) ripple.

    The ripple factor sin^k(theta) cos^2(theta) keeps the pole smooth and vanishes to second
    order at the equator, so the surface still meets {z = 0} at a right angle while being
    non-minimal. z = a cos(theta) is untouched, so theta-levels are z-levels.
    """
    if a <= 0:
        raise ChartError("radius must be positive", details={"a": a})
    if not float(k).is_integer() or k < 1:
        raise ChartError("k must be a positive integer", details={"k": k})
    if abs(delta) >= 0.5:
        raise ChartError("|delta| must stay below 0.5", details={"delta": delta})
    k = int(k)

    def coordinates(u: Sequence[Any]) -> list[Any]:
        theta, phi = u
        s, c = gsin(theta), gcos(theta)
        ripple = 1.0 + delta * s**k * c * c * gcos(k * phi)
        rho = a * s * ripple
        return [rho * gcos(phi), rho * gsin(phi), a * c]

    return Chart(
        name=f"perturbed_hemisphere(a={a:g},delta={delta:g},k={k})",
        dom_dim=2,
        domain=((0.0, math.pi / 2), (0.0, 2 * math.pi)),
        coordinates=coordinates,
        reference=(math.pi / 4, math.pi / 2),
        euler_char=1,
        meets_boundary_orthogonally=True,
        asym_minimal_order=1,
        builtin="perturbed_hemisphere",
        params={"a": a, "delta": delta, "k": k},
        face=_arccos_face(a),
    )


# ===== H^5 families =====


def geodesic_hemisphere4(a: float = 1.0) -> Chart:
    """Euclidean 4-hemisphere of radius a centred on {z = 0}; totally geodesic in H^5."""
    if a <= 0:
        raise ChartError("radius must be positive", details={"a": a})

    def coordinates(u: Sequence[Any]) -> list[Any]:
        t, *angles = u
        return sweep_profile(a * gsin(t), a * gcos(t), angles)

    return Chart(
        name=f"geodesic_hemisphere4(a={a:g})",
        dom_dim=4,
        domain=((0.0, math.pi / 2), *FIBER_DOMAINS[3]),
        coordinates=coordinates,
        reference=(math.pi / 4, *FIBER_POINTS[3]),
        symmetry="revolution",
        euler_char=1,
        meets_boundary_orthogonally=True,
        asym_minimal_order=2,
        profile_dims=1,
        symmetry_factor=FIBER_VOLUMES[3],
        builtin="geodesic_hemisphere4",
        params={"a": a},
        face=_arccos_face(a),
        boundary_b2=_zero_b2,
    )


def _ellipse_frame(a: float, c_axis: float, s: Any) -> tuple[Any, ...]:
    """Boundary ellipse data at angle s: point, unit normal, D, and principal curvatures."""
    cs, ss = gcos(s), gsin(s)
    d = gsqrt(a * a * cs * cs + c_axis * c_axis * ss * ss)
    k_meridian = -a * c_axis / (d * d * d)
    k_rotation = -c_axis / (a * d)
    return cs, ss, d, k_meridian, k_rotation


def perturbed_profile4(a: float = 1.0, delta: float = 0.1, aspect: float = 1.0) -> Chart:
    """Asymptotically minimal (order 2) hypersurface of H^5 with a cos^3 profile bump.

    aspect = 1 gives the SO(4) revolution of rho = a sin t (1 + delta cos^3 t) with a round
    boundary sphere. Otherwise the boundary is the ellipsoid of revolution with semi-axes
    (aspect*a, a, a, a) and the surface is swept under SO(3); a cos^2 t sin^4 t correction
    along the boundary normal cancels the order-z term of H.
    """
    if a <= 0 or aspect <= 0:
        raise ChartError("a and aspect must be positive", details={"a": a, "aspect": aspect})
    if abs(delta) >= 0.5:
        raise ChartError("|delta| must stay below 0.5", details={"delta": delta})

    name = f"perturbed_profile4(a={a:g},delta={delta:g},aspect={aspect:g})"
    params = {"a": a, "delta": delta, "aspect": aspect}

    if aspect == 1.0:

        def coordinates(u: Sequence[Any]) -> list[Any]:
            t, *angles = u
            c = gcos(t)
            return sweep_profile(a * gsin(t) * (1.0 + delta * c**3), a * c, angles)

        return Chart(
            name=name,
            dom_dim=4,
            domain=((0.0, math.pi / 2), *FIBER_DOMAINS[3]),
            coordinates=coordinates,
            reference=(math.pi / 4, *FIBER_POINTS[3]),
            symmetry="revolution",
            euler_char=1,
            meets_boundary_orthogonally=True,
            asym_minimal_order=2,
            profile_dims=1,
            symmetry_factor=FIBER_VOLUMES[3],
            builtin="perturbed_profile4",
            params=params,
            face=_arccos_face(a),
            boundary_b2=_zero_b2,
        )

    c_axis = aspect * a

    def swept(u: Sequence[Any]) -> list[Any]:
        t, s, psi1, psi2 = u
        c, st = gcos(t), gsin(t)
        cs, ss, d, k_m, k_r = _ellipse_frame(a, c_axis, s)
        kappa = a * a * (k_m + 2.0 * k_r) / 6.0 + a * c_axis / (2.0 * d)
        bump = 1.0 + delta * c**3
        correction = c * c * st**4 * kappa
        gamma1 = c_axis * cs * bump + correction * (a * cs / d)
        gamma2 = a * ss * bump + correction * (c_axis * ss / d)
        return [st * gamma1] + [st * gamma2 * w for w in sphere2(psi1, psi2)] + [a * c]

    def b2(s: np.ndarray) -> np.ndarray:
        _, _, _, k_m, k_r = _ellipse_frame(a, c_axis, np.asarray(s, dtype=float))
        return (2.0 / 3.0) * (k_m - k_r) ** 2

    return Chart(
        name=name,
        dom_dim=4,
        domain=((0.0, math.pi / 2), (0.0, math.pi), *FIBER_DOMAINS[2]),
        coordinates=swept,
        reference=(math.pi / 4, math.pi / 2, *FIBER_POINTS[2]),
        symmetry="revolution",
        euler_char=1,
        meets_boundary_orthogonally=True,
        asym_minimal_order=2,
        profile_dims=2,
        symmetry_factor=FIBER_VOLUMES[2],
        builtin="perturbed_profile4",
        params=params,
        face=_arccos_face(a),
        boundary_b2=b2,
    )


# ===== Closed surfaces =====


def round_sphere(m: float = 2, z0: float = 3.0) -> Chart:
    """Unit S^m (m = 2 or 4) centred at height z0, inward normal, chi = 2."""
    if m not in (2, 4):
        raise ChartError("m must be 2 or 4", details={"m": m})
    if z0 <= 1.0:
        raise ChartError("the sphere must lie in {z > 0}: need z0 > 1", details={"z0": z0})
    m = int(m)
    fiber_dims = m - 1

    def coordinates(u: Sequence[Any]) -> list[Any]:
        t, *angles = u
        return sweep_profile(gsin(t), z0 + gcos(t), angles)

    return Chart(
        name=f"round_sphere(m={m},z0={z0:g})",
        dom_dim=m,
        domain=((0.0, math.pi), *FIBER_DOMAINS[fiber_dims]),
        coordinates=coordinates,
        # Lower hemisphere: xi_z >= 0 there selects the inward normal.
        reference=(3 * math.pi / 4, *FIBER_POINTS[fiber_dims]),
        symmetry="revolution",
        euler_char=2,
        closed=True,
        profile_dims=1,
        symmetry_factor=FIBER_VOLUMES[fiber_dims],
        builtin="round_sphere",
        params={"m": m, "z0": z0},
        face=_arccos_face(1.0, offset=z0),
    )


CATALOG: dict[str, CatalogEntry] = {
    "geodesic_hemisphere": CatalogEntry(
        "geodesic_hemisphere",
        "Totally geodesic hemisphere in H^3 (chi = 1, H = 0).",
        {"a": (1.0, "Euclidean radius")},
        geodesic_hemisphere,
    ),
    "perturbed_hemisphere": CatalogEntry(
        "perturbed_hemisphere",
        "Non-minimal surface in H^3 meeting the ideal boundary orthogonally (chi = 1).",
        {
            "a": (1.0, "Euclidean radius"),
            "delta": (0.05, "ripple amplitude, |delta| < 0.5"),
            "k": (2, "angular wave number, positive integer"),
        },
        perturbed_hemisphere,
    ),
    "geodesic_hemisphere4": CatalogEntry(
        "geodesic_hemisphere4",
        "Totally geodesic 4-hemisphere in H^5 (chi = 1).",
        {"a": (1.0, "Euclidean radius")},
        geodesic_hemisphere4,
    ),
    "perturbed_profile4": CatalogEntry(
        "perturbed_profile4",
        "Asymptotically minimal (order 2) hypersurface in H^5; aspect != 1 bends the "
        "boundary into an ellipsoid so that |II°|^2 != 0.",
        {
            "a": (1.0, "Euclidean radius"),
            "delta": (0.1, "profile bump amplitude, |delta| < 0.5"),
            "aspect": (1.0, "boundary ellipsoid aspect ratio"),
        },
        perturbed_profile4,
    ),
    "round_sphere": CatalogEntry(
        "round_sphere",
        "Closed unit S^2 or S^4 at height z0 (chi = 2, Euclidean checks).",
        {"m": (2, "sphere dimension, 2 or 4"), "z0": (3.0, "centre height, > 1")},
        round_sphere,
    ),
}


def build_builtin(name: str, params: dict[str, float] | None = None) -> Chart:
    """Instantiate a catalog family, rejecting unknown families and parameters."""
    entry = CATALOG.get(name)
    if entry is None:
        raise ChartError(
            f"unknown builtin surface {name!r}", details={"available": sorted(CATALOG)}
        )
    params = params or {}
    validate_config_keys(params, entry.params, source=f"parameters of {name}")
    return entry.build(**params)


def chart_from_spec(spec: SurfaceSpec) -> Chart:
    """Build a chart from a validated surface spec."""
    if spec.builtin is not None:
        if spec.expr is not None or spec.profile is not None:
            raise ChartError("a surface spec is either builtin or expression, not both")
        return build_builtin(spec.builtin, spec.params)

    sources = spec.profile if spec.symmetry == "revolution" else spec.expr
    if not sources or spec.domain is None:
        raise ChartError(
            "expression surfaces need 'expr' (or 'profile' with symmetry 'revolution') "
            "and 'domain'"
        )
    exprs = [parse_expr(src) for src in sources]
    chart = expression_chart(
        spec.name or "expression",
        exprs,
        spec.domain,
        symmetry=spec.symmetry,
        dom_dim=spec.dom_dim,
        reference=spec.reference,
        euler_char=spec.euler_char,
        orthogonal=spec.orthogonal,
        asym_order=spec.asym_order,
        closed=spec.closed,
    )
    require_declared_asymptotics(chart)
    return chart


def load_surface(source: str) -> Chart:
    """Resolve ``builtin:<name>?k=v&...`` or a path to a JSON surface file."""
    if source.startswith("builtin:"):
        name, _, query = source[len("builtin:") :].partition("?")
        try:
            pairs = parse_qsl(query, strict_parsing=bool(query))
            params = {key: float(value) for key, value in pairs}
        except ValueError as exc:
            raise ChartError(
                f"invalid builtin parameters in {source!r}", details={"error": str(exc)}
            )
        chart = build_builtin(name, params)
    else:
        try:
            payload = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ChartError(
                f"surface file {source} is not valid JSON",
                details={"line": exc.lineno, "column": exc.colno, "error": exc.msg},
            )
        chart = chart_from_spec(SurfaceSpec.model_validate(payload))
    logger.debug(f"Loaded surface {chart.name} from {source}")
    return chart
