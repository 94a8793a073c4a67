"""`verify`: one identity on one surface."""

import argparse

from ...core.exceptions import ConfigError, VerificationError
from ...core.handlers import EXIT_CHECK_FAILED, EXIT_OK
from ...schemas.run import RunConfig
from ...schemas.verification import VerificationReport
from ...services.chart import Chart
from ...services.theorems import TheoremService
from ..deps import get_chart, get_theorem_service
from ..output import CommandResult

THEOREMS = ["gb", "cgb", "prop1", "thm2", "cor1", "thm3", "cor2"]


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("verify", help="check an area identity")
    parser.add_argument("--theorem", type=str.lower, choices=THEOREMS)
    parser.add_argument("--surface")
    parser.add_argument("--eps", type=float, help="truncation height (gb, cgb, prop1)")
    parser.add_argument("--metric", choices=["euclidean", "hyperbolic"])
    parser.add_argument("--force", action="store_true", default=None, help="skip thm3 preconditions")
    parser.add_argument(
        "--with-topology",
        dest="with_topology",
        action="store_true",
        default=None,
        help="also assemble prop1 with the Euler characteristic written out",
    )


def verify(service: TheoremService, chart: Chart, config: RunConfig) -> VerificationReport:
    """Dispatch on the theorem id."""
    eps = config.eps or None
    match config.theorem:
        case "GB" | "CGB":
            expected = 2 if config.theorem == "GB" else 4
            if chart.dom_dim != expected:
                raise VerificationError(
                    f"{config.theorem} needs a {expected}-dimensional M",
                    details={"dom_dim": chart.dom_dim},
                )
            return service.gauss_bonnet(chart, eps, config.metric)
        case "PROP1":
            return service.prop1(chart, eps, config.with_topology)
        case "THM2":
            return service.thm2(chart)
        case "COR1":
            return service.cor1(chart)
        case "THM3":
            return service.thm3(chart, config.force)
        case "COR2":
            return service.cor2(chart)
    raise ConfigError("verify needs --theorem", details={"choices": THEOREMS})


def run(config: RunConfig) -> CommandResult:
    report = verify(get_theorem_service(config), get_chart(config), config)
    return report, EXIT_OK if report.passed else EXIT_CHECK_FAILED
