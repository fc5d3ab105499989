"""Spectral solvers for 2D Dirac operators with a shell interaction on a line."""

__version__ = "0.1.0"
