"""Birational sheets and induction data for classical simply connected groups."""

__version__ = "0.1.0"
