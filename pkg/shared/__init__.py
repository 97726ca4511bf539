"""Shared domain layer for the rank-one phase-transition toolkit."""

__version__ = "0.3.0"
