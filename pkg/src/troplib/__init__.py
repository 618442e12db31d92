"""Exact computational toolkit for tropical tori, curves, Jacobians and theta divisors."""

__version__ = "0.1.0"
