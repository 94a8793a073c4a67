"""`renorm`: finite part of a truncated integral."""

import argparse

from ...core.handlers import EXIT_OK
from ...schemas.run import RunConfig
from ...services.renorm import finite_part
from ..deps import get_chart, get_ladder, get_quadrature_spec
from ..output import CommandResult


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("renorm", help="finite part of the eps-expansion")
    parser.add_argument("--surface")
    parser.add_argument("--quantity")
    parser.add_argument("--metric", choices=["euclidean", "hyperbolic"])


def run(config: RunConfig) -> CommandResult:
    chart = get_chart(config)
    fit = finite_part(
        chart,
        config.quantity,
        ladder=get_ladder(config),
        metric_tag=config.metric,
        spec=get_quadrature_spec(config),
    )
    return fit, EXIT_OK
