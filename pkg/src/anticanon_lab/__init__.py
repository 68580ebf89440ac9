"""Exact verification engine for anticanonical systems on twistor spaces of 4CP^2."""

__version__ = "0.1.0"
