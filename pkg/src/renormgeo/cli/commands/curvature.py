"""`curvature`: every pointwise quantity at one chart point."""

import argparse

from ...core.handlers import EXIT_OK
from ...schemas.run import CurvatureReport, RunConfig
from ...services.extrinsic import chen_invariant, conformal_relations_check, extrinsic_frame
from ...services.intrinsic import boundary_frame, intrinsic_frame
from ..deps import get_chart
from ..output import CommandResult


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("curvature", help="curvature frames at a chart point")
    parser.add_argument("--surface")
    parser.add_argument("--point", type=float, nargs="+", help="chart parameters (default: reference)")
    parser.add_argument("--metric", choices=["euclidean", "hyperbolic"])
    parser.add_argument(
        "--eps", type=float, help="also report the boundary frame of z >= eps below --point"
    )


def run(config: RunConfig) -> CommandResult:
    chart = get_chart(config)
    point = list(config.point) if config.point else list(chart.reference)
    frame = extrinsic_frame(chart, point)
    boundary = None
    if config.eps is not None:
        face = chart.face_parameter(config.eps or None)
        boundary = boundary_frame(chart, [face, *point[1:]], config.eps or None, config.metric)
    report = CurvatureReport(
        chart=chart.name,
        extrinsic=frame,
        conformal=conformal_relations_check(frame),
        chen=chen_invariant(frame),
        intrinsic=intrinsic_frame(chart, point, config.metric),
        boundary=boundary,
    )
    return report, EXIT_OK
