"""Elephant random walks on Cayley trees of free products."""

__version__ = "0.1.0"
