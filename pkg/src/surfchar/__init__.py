"""Exact SL2 character-variety computations for punctured surfaces."""

__version__ = "0.1.0"
