"""`expand`: near-boundary expansion checks on asymptotically minimal charts."""

import argparse

from ...core.handlers import EXIT_CHECK_FAILED, EXIT_OK
from ...schemas.run import RunConfig
from ...services.renorm import (
    basis_honesty,
    bform_expansion,
    boundary_s_constant_term,
    laplacian_correction_check,
)
from ..deps import get_chart, get_ladder, get_quadrature_spec
from ..output import CommandResult


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("expand", help="expansion checks near the ideal boundary")
    parser.add_argument("--surface")
    parser.add_argument("--check", choices=["bform", "laplacian", "s_boundary", "honesty"])
    parser.add_argument(
        "--point", type=float, nargs="+", help="ray parameters after the height axis (bform)"
    )
    parser.add_argument("--quantity", help="integrand for the honesty check")


def run(config: RunConfig) -> CommandResult:
    chart = get_chart(config)
    ladder = get_ladder(config)
    spec = get_quadrature_spec(config)
    if config.check == "bform":
        report = bform_expansion(chart, along=config.point)
    elif config.check == "laplacian":
        report = laplacian_correction_check(chart, ladder, spec)
    elif config.check == "s_boundary":
        report = boundary_s_constant_term(chart, ladder, spec)
    else:
        report = basis_honesty(chart, config.quantity, ladder, config.metric, spec)
    return report, EXIT_OK if report.passed else EXIT_CHECK_FAILED
