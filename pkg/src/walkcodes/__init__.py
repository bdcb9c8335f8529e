"""Balanced binary codes from direct-sum lifts over walks on wide replacement products."""

__version__ = "0.1.0"
