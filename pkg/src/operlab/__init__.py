"""Lie-theoretic constants, Epstein-Poincare surface geometry and Anosov
criteria for opers on the hyperbolic disk."""

__version__ = "0.1.0"
