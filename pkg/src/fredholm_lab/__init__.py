"""Desk-scale Fredholm index laboratory: truncated operator models, index routes,
Chern pairings and s-number ideals."""

__version__ = "0.1.0"
