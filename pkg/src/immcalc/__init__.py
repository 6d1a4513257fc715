"""Exact calculator for plumbed 4-manifolds and Smale invariants of S^3 -> R^4 immersions."""

__version__ = "0.1.0"
