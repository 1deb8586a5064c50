"""Exact lattice-point calculus for simple lattice polytopes."""

__version__ = "0.1.0"
