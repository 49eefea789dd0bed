"""Directed homology and deadlock analysis for higher-dimensional automata."""

__version__ = "0.1.0"
