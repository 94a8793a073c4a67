"""Configuration validators."""

from collections.abc import Iterable, Mapping
from typing import Any

from .exceptions import ConfigError


def validate_config_keys(
    payload: Mapping[str, Any], allowed: Iterable[str], source: str = "config"
) -> None:
    """Reject unknown keys in a config mapping, listing every offender."""
    allowed_set = set(allowed)

    unknown = sorted(key for key in payload if key not in allowed_set)

    if unknown:
        raise ConfigError(
            f"Unknown keys in {source}:\n" + "\n".join(f"  - {key}" for key in unknown),
            details={"unknown": unknown, "allowed": sorted(allowed_set)},
        )


def validate_thread_count(threads: int) -> int:
    """Validate a worker count (0 = auto)."""
    if threads < 0:
        raise ConfigError(
            "threads must be >= 0 (0 = one worker per CPU)", details={"threads": threads}
        )

    return threads
