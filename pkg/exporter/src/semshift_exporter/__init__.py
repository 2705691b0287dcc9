"""Contextual-vector exporter for the semshift embedding interchange format."""

__version__ = "0.1.0"
