"""Pinning control for desynchronising networked Kuramoto oscillators."""

__version__ = "0.1.0"
