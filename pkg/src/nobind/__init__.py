"""Certified no-binding thresholds for polaron-type models."""

__version__ = "0.1.0"
