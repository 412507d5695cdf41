"""Simulation and exact analysis of multi-information rumor propagation."""

__version__ = "0.1.0"
