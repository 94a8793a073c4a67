"""Numerical engine: jets, charts, curvature, quadrature, renormalization, identities."""
