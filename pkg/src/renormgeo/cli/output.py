"""Report serialization: JSON for reports, CSV for ladders."""

import csv
import io
import sys
from pathlib import Path

from pydantic import BaseModel

from ..core.exceptions import ConfigError
from ..schemas.renorm import BFormExpansion, ConstantTermCheck, ExpansionFit
from ..schemas.run import IntegralLadder, RunConfig
from ..utils.logging import logger

CommandResult = tuple[BaseModel, int]


def ladder_rows(report: BaseModel) -> tuple[tuple[str, str], list[tuple[float, float]]]:
    """Header and (x, value) rows of a ladder-bearing report."""
    if isinstance(report, IntegralLadder):
        return ("eps", "value"), [(item.eps or 0.0, item.value) for item in report.integrals]
    if isinstance(report, ExpansionFit):
        return ("eps", "value"), list(report.ladder)
    if isinstance(report, ConstantTermCheck):
        return ("eps", "value"), list(report.fit.ladder)
    if isinstance(report, BFormExpansion):
        return ("r", "B0sq_over_r2"), list(report.fit.ladder)
    raise ConfigError(
        f"csv output is available for ladders only, not {type(report).__name__}",
        details={"format": "csv"},
    )


def render(report: BaseModel, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(by_alias=True, indent=2) + "\n"
    header, rows = ladder_rows(report)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows((repr(x), repr(y)) for x, y in rows)
    return buffer.getvalue()


def write_report(report: BaseModel, config: RunConfig) -> None:
    """Write to ``config.output`` or stdout."""
    text = render(report, config.format)
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {config.format} report to {config.output}")
    else:
        sys.stdout.write(text)
