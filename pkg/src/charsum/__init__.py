"""Exact experiments with offset families of multiplicative character sums over finite fields."""

__version__ = "0.1.0"
