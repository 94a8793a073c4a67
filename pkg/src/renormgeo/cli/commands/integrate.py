"""`integrate`: truncated integrals over M_eps (or its face z = eps)."""

import argparse

from ...core.handlers import EXIT_OK
from ...schemas.run import IntegralLadder, RunConfig
from ...services.quadrature import integral_report
from ..deps import get_chart, get_ladder, get_quadrature_spec
from ..output import CommandResult


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("integrate", help="truncated integral of a quantity")
    parser.add_argument("--surface")
    parser.add_argument("--quantity")
    parser.add_argument("--metric", choices=["euclidean", "hyperbolic"])
    parser.add_argument("--eps", type=float, help="single truncation height (default: the ladder)")
    parser.add_argument(
        "--boundary", action="store_true", default=None, help="integrate over the face z = eps"
    )


def run(config: RunConfig) -> CommandResult:
    chart = get_chart(config)
    spec = get_quadrature_spec(config)
    heights = [config.eps] if config.eps is not None else get_ladder(config)
    integrals = [
        integral_report(chart, config.quantity, eps or None, config.metric, spec, config.boundary)
        for eps in heights
    ]
    report = IntegralLadder(
        chart=chart.name,
        quantity=integrals[0].quantity,
        metric_tag=config.metric,
        integrals=integrals,
    )
    return report, EXIT_OK
