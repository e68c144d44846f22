"""Homology cobordism invariants and Seifert fibered obstructions in exact arithmetic."""

__version__ = "0.1.0"
