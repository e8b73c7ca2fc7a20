"""Veering triangulations, double covers and persistent-foliarity obstructions for cusped 3-manifolds."""

__version__ = "0.1.0"
