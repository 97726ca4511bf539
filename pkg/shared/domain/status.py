"""Status enums for iterative runs and sweep points."""

from enum import Enum


class RunStatus(str, Enum):
    """Outcome of an iterative algorithm."""
    CONVERGED = "CONVERGED"
    NOT_CONVERGED = "NOT_CONVERGED"
    DIVERGED = "DIVERGED"


class PointStatus(str, Enum):
    """Status of one point of a parameter sweep."""
    PENDING = "PENDING"
    DONE = "DONE"
    FAILED = "FAILED"
