"""Elliptic Painleve equation from Pade interpolation: special functions,
the interpolation solve, the T-evolution, Lax pair, determinant formulas and
the E8 Weyl group action."""

__version__ = "0.1.0"
