"""BREA - Byzantine-resilient secure aggregation simulator for federated learning."""

__version__ = "0.1.0"
__author__ = "BREA Simulator Team"
