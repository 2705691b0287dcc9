"""Temporal corpus analysis: semantic-change detection and masked-corpus compilation."""

__version__ = "0.1.0"
