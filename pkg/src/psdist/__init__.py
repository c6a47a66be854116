"""Numerical harmonic analysis on the hyperbolic disk and rank-one groups."""

__version__ = "0.1.0"
