"""Numeric helpers shared by the services."""

import math
from collections.abc import Iterable
from typing import Any

import numpy as np

from ..services import jets
from ..services.jets import Jet


def gsin(x: Any) -> Any:
    return jets.sin(x) if isinstance(x, Jet) else np.sin(x)


def gcos(x: Any) -> Any:
    return jets.cos(x) if isinstance(x, Jet) else np.cos(x)


def gsqrt(x: Any) -> Any:
    return jets.sqrt(x) if isinstance(x, Jet) else np.sqrt(x)


def relative_error(lhs: float, rhs: float) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|, 1)."""
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def ordered_sum(values: Iterable[float]) -> float:
    """Compensated sum in the given order; bit-identical across runs."""
    return math.fsum(float(v) for v in values)


def geometric_ladder(eps0: float, ratio: float, rungs: int) -> list[float]:
    """eps_k = eps0 * ratio**-k for k = 0..rungs-1 (strictly decreasing)."""
    return [eps0 * ratio ** (-k) for k in range(rungs)]
