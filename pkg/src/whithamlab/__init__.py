"""Pseudospectral laboratory for Whitham-type models."""

__version__ = "0.1.0"
