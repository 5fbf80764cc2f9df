"""Alternating data automata over linear rational arithmetic."""
__version__ = "0.1.0"
