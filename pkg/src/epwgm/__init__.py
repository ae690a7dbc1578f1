"""Exact computations with EPW sextics, Gushel–Mukai data and K3 lattices."""

__version__ = "0.1.0"
