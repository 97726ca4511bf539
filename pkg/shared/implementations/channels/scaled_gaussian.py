"""Gaussian channel with a rescaled input; no closed-form Fisher information is declared."""

import numpy as np

from shared.domain.consts import ChannelName
from shared.interfaces.output_channel import OutputChannel


class ScaledGaussianChannel(OutputChannel):
    """w = scale * y + sqrt(variance) z.

    The effective noise is variance / scale^2; it is left to the Monte Carlo
    estimator so that path is exercised on a channel with a known answer.
    """

    name = ChannelName.SCALED_GAUSSIAN.value

    def __init__(self, scale: float = 1.0, variance: float = 1.0):
        if not variance > 0:
            raise ValueError(f"Channel variance must be positive, got {variance}")
        self.scale = float(scale)
        self.variance = float(variance)

    def log_likelihood(self, w: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = np.asarray(w, dtype=float) - self.scale * np.asarray(y, dtype=float)
        return -0.5 * diff**2 / self.variance - 0.5 * np.log(2 * np.pi * self.variance)

    def sample(self, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.scale * y + np.sqrt(self.variance) * rng.standard_normal(y.shape)

    def describe(self) -> dict:
        return {"name": self.name, "scale": self.scale, "variance": self.variance}
