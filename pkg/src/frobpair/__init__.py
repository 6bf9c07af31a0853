"""Exact algebra for commutative Frobenius pairs with Mobius maps."""

__version__ = "0.1.0"
