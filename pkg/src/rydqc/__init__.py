"""Rydberg-atom structure, pair dynamics and spectroscopy simulations."""

__version__ = "0.1.0"
