"""Koopman-operator analysis of numerical algorithms."""

__version__ = "0.1.0"
