"""Exact computations with quantum symmetric pairs and their spherical vectors."""

__version__ = "0.1.0"
