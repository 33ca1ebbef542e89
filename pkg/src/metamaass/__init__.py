"""Numerical toolkit for half-integral weight Maass forms attached to quadratic forms."""

__version__ = "0.1.0"
