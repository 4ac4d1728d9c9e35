"""Detect alternative monetization strategies in video descriptions."""

__version__ = "0.1.0"
