"""Neumann eigenvalues of nested convex domains: geometry, nets, FEM, oracles, checks."""

__version__ = "0.1.0"
