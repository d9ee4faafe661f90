"""Focalised classical sequent calculi."""
__version__ = "0.1.0"
