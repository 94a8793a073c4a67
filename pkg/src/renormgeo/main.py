"""Command-line entry point."""

import sys

from .cli.output import write_report
from .cli.router import dispatch, load_config
from .core.handlers import handle_exception
from .utils.logging import setup_logging


def main(argv: list[str] | None = None) -> int:
    """Run one CLI invocation and return its exit status."""
    try:
        config = load_config(argv)
        if config.log_level:
            setup_logging(config.log_level)
        report, code = dispatch(config)
        write_report(report, config)
        return code
    except Exception as exc:
        error, code = handle_exception(exc)
        sys.stdout.write(error.model_dump_json(indent=2) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
