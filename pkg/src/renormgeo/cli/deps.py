"""Helpers that turn a RunConfig into the objects the commands work with."""

from ..core.exceptions import ConfigError
from ..schemas.quadrature import QuadratureSpec
from ..schemas.run import RunConfig
from ..services.catalog import load_surface
from ..services.chart import Chart
from ..services.renorm import default_ladder
from ..services.theorems import TheoremService


def get_chart(config: RunConfig) -> Chart:
    """Load the surface named by the config."""
    if not config.surface:
        raise ConfigError(f"'{config.subcommand}' needs --surface")
    return load_surface(config.surface)


def get_quadrature_spec(config: RunConfig) -> QuadratureSpec:
    return config.quadrature_spec()


def get_ladder(config: RunConfig) -> list[float]:
    return default_ladder(config.eps0, config.ratio, config.rungs)


def get_theorem_service(config: RunConfig) -> TheoremService:
    return TheoremService(get_quadrature_spec(config), get_ladder(config))
