"""Normalized standing waves of 1-D NLS with an implicit algebraic nonlinearity."""

__version__ = "0.1.0"
