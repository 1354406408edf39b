"""Synchronized Planarity solver, reduction frontends and brute-force oracle."""

__version__ = "0.1.0"
