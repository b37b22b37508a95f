"""Discrete isoperimetry on Cayley graphs and grids."""

__version__ = "0.1.0"
