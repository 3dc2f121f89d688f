"""Exact and numerical computations on finite-dimensional Lie algebra actions on coordinate charts."""

__version__ = "0.1.0"
