from . import catalog, curvature, expand, integrate, renorm, suite, verify

__all__ = [
    "catalog",
    "curvature",
    "expand",
    "integrate",
    "renorm",
    "suite",
    "verify",
]
