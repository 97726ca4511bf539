"""Abstract element-wise output channel interface."""

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np


class OutputChannel(ABC):
    """Element-wise observation channel P_out(w | y) with y = s_i s_j / sqrt(n).

    All channels must implement:
    - log_likelihood: log P_out(w | y), vectorised over w and y
    - sample: draw w ~ P_out(. | y) for an array of y

    Channels with a closed-form Fisher information at y = 0 override
    ``fisher_information``; the others are handled by Monte Carlo.
    """

    name: str = "channel"

    @abstractmethod
    def log_likelihood(self, w: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Return log P_out(w | y) element-wise.

        Raises:
            ValueError: If y leaves the channel's domain
        """
        pass

    @abstractmethod
    def sample(self, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw one output per entry of y."""
        pass

    def fisher_information(self) -> Optional[float]:
        """Closed-form E_{P_out(w|0)}[(d/dy log P_out(w|y) at 0)^2], or None."""
        return None

    def describe(self) -> dict:
        return {"name": self.name}
