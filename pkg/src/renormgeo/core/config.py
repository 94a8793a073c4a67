"""Application configuration settings."""

import os

from dotenv import load_dotenv
from pydantic import BaseModel

# Load environment variables from .env file
load_dotenv()


class Settings(BaseModel):
    """Runtime settings for the numerical engine and the CLI."""

    # Logging
    debug: bool = os.getenv("RENORMGEO_DEBUG", "false").lower() == "true"
    log_level: str | None = os.getenv("RENORMGEO_LOG_LEVEL")

    # Renormalization ladder defaults
    eps0: float = float(os.getenv("RENORMGEO_EPS0", "0.1"))
    ladder_ratio: float = float(os.getenv("RENORMGEO_LADDER_RATIO", "2.0"))
    rungs: int = int(os.getenv("RENORMGEO_RUNGS", "8"))

    # Quadrature defaults
    quad_order: int = int(os.getenv("RENORMGEO_QUAD_ORDER", "48"))
    profile_order: int = int(os.getenv("RENORMGEO_PROFILE_ORDER", "64"))
    panels: int = int(os.getenv("RENORMGEO_PANELS", "8"))

    # Worker pool
    @property
    def threads(self) -> int:
        """Resolve the worker count; 0 means one worker per CPU."""
        raw = os.getenv("RENORMGEO_THREADS", "0")
        try:
            count = int(raw)
        except ValueError:
            raise ValueError(f"RENORMGEO_THREADS must be an integer, got {raw!r}")

        if count < 0:
            raise ValueError("RENORMGEO_THREADS must be >= 0 (0 = one worker per CPU)")

        if count == 0:
            return os.cpu_count() or 1

        return count

    @property
    def resolved_log_level(self) -> str:
        """Explicit level wins, otherwise DEBUG in debug mode and INFO elsewhere."""
        if self.log_level:
            return self.log_level.upper()
        return "DEBUG" if self.debug else "INFO"


# Global settings instance
settings = Settings()
