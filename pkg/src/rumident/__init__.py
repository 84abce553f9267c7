"""Exact identification analysis for random utility models on finite sets."""

__version__ = "0.1.0"
