"""Quaternionic contact geometry on the quaternionic Heisenberg group and the sphere."""

__version__ = "0.1.0"
