"""Pairwise retarded van der Waals estimates of Casimir energies and related tools."""

__version__ = "0.1.0"
