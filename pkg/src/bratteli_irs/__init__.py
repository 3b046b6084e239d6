"""Finite-level computations for AF full groups of Bratteli diagrams."""

__version__ = "0.1.0"
