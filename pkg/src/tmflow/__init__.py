"""Turing machines lowered to generalized shifts, Cantor block maps and planar flows."""

__version__ = "0.1.0"
