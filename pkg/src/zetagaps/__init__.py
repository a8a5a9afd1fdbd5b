"""Zeros of zeta and zeta', their pairing, and the gap statistics built on them."""

__version__ = "0.1.0"
