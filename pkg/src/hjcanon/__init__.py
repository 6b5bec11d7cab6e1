"""Canonical analysis of constrained Lagrangians with graded variables."""

__version__ = "0.1.0"
