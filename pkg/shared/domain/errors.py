"""Error types raised by the numerical services."""

from typing import Sequence


class TooManyStationaryPointsError(ValueError):
    """More than three stationary points were found for one noise level."""

    def __init__(self, delta: float, roots: Sequence[float]):
        self.delta = delta
        self.roots = list(roots)
        listed = ", ".join(f"{r:.12g}" for r in self.roots)
        super().__init__(
            f"Found {len(self.roots)} stationary points at delta={delta:.12g} "
            f"(E = {listed}); at most three stationary points are expected"
        )


class NoStationaryPointError(RuntimeError):
    """Internal error: the fixed-point equation produced no root."""


class StateSpaceTooLargeError(ValueError):
    """Exact enumeration would exceed the configured state cap."""

    def __init__(self, states: int, limit: int):
        self.states = states
        self.limit = limit
        super().__init__(f"Enumeration needs {states} states, limit is {limit}")


class LinkProbabilityError(ValueError):
    """A community-model link probability fell outside (0, 1)."""


class ExperimentConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, source: str, problems: Sequence[str]):
        self.source = source
        self.problems = list(problems)
        details = "; ".join(self.problems)
        super().__init__(f"Invalid experiment config {source}: {details}")
