"""Analytic continuation of weighted Bergman spaces and Toeplitz operators on the unit ball."""

__version__ = "0.1.0"
