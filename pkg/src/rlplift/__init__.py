"""Relational linear programming with lifted (symmetry-reduced) solving."""

__version__ = "0.1.0"
