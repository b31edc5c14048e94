"""Polynuclear growth with external sources: limit laws, exact finite-size
formulas and Monte Carlo checks."""

__version__ = "0.1.0"
