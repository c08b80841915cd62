"""Capacities of channels built from bipartite unitaries with a helper-controlled environment."""

__version__ = "0.1.0"
