"""Combinatorial horoballs, blowup graphs and cusped spaces of combinatorial HHS."""

__version__ = "0.1.0"
