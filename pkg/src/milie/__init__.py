"""Iterative, conditioned open information extraction."""

__version__ = "0.1.0"
