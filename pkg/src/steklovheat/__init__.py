"""Exact heat-trace invariants of the magnetic Dirichlet-to-Neumann map."""

__version__ = "0.1.0"
