"""Exact tools for Diophantine approximation over Q and Q(i)."""

__version__ = "0.1.0"
