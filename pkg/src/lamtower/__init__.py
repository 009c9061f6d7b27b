"""Coding trees, finite covers and certified tower plans for surface laminations."""

__version__ = "0.1.0"
