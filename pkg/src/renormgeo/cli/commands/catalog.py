"""`catalog list`: the builtin surface families."""

import argparse

from ...core.handlers import EXIT_OK
from ...schemas.run import CatalogItem, CatalogReport, RunConfig
from ...services.catalog import CATALOG
from ..output import CommandResult


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("catalog", help="list the builtin surface families")
    parser.add_argument("action", nargs="?", choices=["list"])


def run(config: RunConfig) -> CommandResult:
    surfaces = [
        CatalogItem(name=entry.name, summary=entry.summary, params=entry.params)
        for entry in CATALOG.values()
    ]
    return CatalogReport(surfaces=surfaces, message=f"{len(surfaces)} builtin surfaces"), EXIT_OK
