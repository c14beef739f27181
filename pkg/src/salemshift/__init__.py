"""Symbolic coding of Salem and Pisot toral automorphisms."""

__version__ = "0.1.0"
