"""Argument parsing and subcommand dispatch."""

import argparse
import json
from pathlib import Path
from types import ModuleType
from typing import Any

from ..core.exceptions import ConfigError
from ..core.validators import validate_config_keys
from ..schemas.run import RunConfig
from .commands import catalog, curvature, expand, integrate, renorm, suite, verify
from .output import CommandResult

COMMANDS: dict[str, ModuleType] = {
    "catalog": catalog,
    "curvature": curvature,
    "integrate": integrate,
    "renorm": renorm,
    "expand": expand,
    "verify": verify,
    "suite": suite,
}

# Parser destinations that are not RunConfig fields.
_PARSER_ONLY = {"config", "action"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renormgeo",
        description="Renormalized areas and curvature identities for hypersurfaces of H^3 and H^5.",
    )
    parser.add_argument("--config", help="JSON run configuration; flags override its keys")
    parser.add_argument("--threads", type=int, help="worker count (0 = one per CPU)")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=["json", "csv"])
    parser.add_argument("--log-level", dest="log_level")

    ladder = parser.add_argument_group("eps-ladder")
    ladder.add_argument("--eps0", type=float)
    ladder.add_argument("--ratio", type=float)
    ladder.add_argument("--rungs", type=int)

    quadrature = parser.add_argument_group("quadrature")
    quadrature.add_argument("--rule", type=int, help="Gauss-Legendre nodes per panel and axis")
    quadrature.add_argument(
        "--profile-rule", dest="profile_rule", type=int, help="nodes for 1D profile charts"
    )
    quadrature.add_argument("--subdivision", type=int, help="minimum geometric panels")

    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for command in COMMANDS.values():
        command.register(subparsers)
    return parser


def _read_config_file(path: str) -> dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config file {path} is not valid JSON",
            details={"line": exc.lineno, "column": exc.colno, "error": exc.msg},
        )
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    validate_config_keys(payload, RunConfig.model_fields, source=path)
    return payload


def load_config(argv: list[str] | None = None) -> RunConfig:
    """Parse flags, layer them over the optional config file, and validate."""
    args = vars(build_parser().parse_args(argv))
    payload = _read_config_file(args["config"]) if args["config"] else {}
    payload.update(
        {key: value for key, value in args.items() if value is not None and key not in _PARSER_ONLY}
    )
    return RunConfig.model_validate(payload)


def dispatch(config: RunConfig) -> CommandResult:
    return COMMANDS[config.subcommand].run(config)
