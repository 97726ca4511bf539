"""Additive white Gaussian noise channel."""

import numpy as np

from shared.domain.consts import ChannelName
from shared.interfaces.output_channel import OutputChannel


class GaussianChannel(OutputChannel):
    """w = y + sqrt(variance) z, z ~ N(0, 1).

    Fisher information at y = 0 is 1/variance, so the effective noise is the
    variance itself.
    """

    name = ChannelName.GAUSSIAN.value

    def __init__(self, variance: float = 1.0):
        if not variance > 0:
            raise ValueError(f"Channel variance must be positive, got {variance}")
        self.variance = float(variance)

    def log_likelihood(self, w: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = np.asarray(w, dtype=float) - np.asarray(y, dtype=float)
        return -0.5 * diff**2 / self.variance - 0.5 * np.log(2 * np.pi * self.variance)

    def sample(self, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return y + np.sqrt(self.variance) * rng.standard_normal(y.shape)

    def fisher_information(self) -> float:
        return 1.0 / self.variance

    def describe(self) -> dict:
        return {"name": self.name, "variance": self.variance}
