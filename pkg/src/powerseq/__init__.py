"""Exact and Monte Carlo experiments on convergence of powers x^n along index sets and filters."""

__version__ = "0.1.0"
