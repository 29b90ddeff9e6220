"""Numerical classification of two-term asymptotic expansions."""

__version__ = "0.1.0"
