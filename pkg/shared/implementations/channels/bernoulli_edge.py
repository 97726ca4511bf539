"""Bernoulli edge channel of the two-community graph model."""

import numpy as np

from shared.domain.consts import ChannelName
from shared.interfaces.output_channel import OutputChannel


class BernoulliEdgeChannel(OutputChannel):
    """w in {0, 1} with P(w = 1 | y) = p + mu * y.

    Fisher information at y = 0 is mu^2 / (p (1 - p)).
    """

    name = ChannelName.BERNOULLI_EDGE.value

    def __init__(self, p: float, mu: float):
        if not 0 < p < 1:
            raise ValueError(f"Base link probability must lie in (0, 1), got {p}")
        self.p = float(p)
        self.mu = float(mu)

    def link_probability(self, y: np.ndarray) -> np.ndarray:
        prob = self.p + self.mu * np.asarray(y, dtype=float)
        if np.any(prob <= 0) or np.any(prob >= 1):
            raise ValueError(
                f"Link probability left (0, 1): range [{prob.min()}, {prob.max()}]"
            )
        return prob

    def log_likelihood(self, w: np.ndarray, y: np.ndarray) -> np.ndarray:
        prob = self.link_probability(y)
        w = np.asarray(w, dtype=float)
        return w * np.log(prob) + (1.0 - w) * np.log1p(-prob)

    def sample(self, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        prob = self.link_probability(y)
        return (rng.random(prob.shape) < prob).astype(float)

    def fisher_information(self) -> float:
        return self.mu**2 / (self.p * (1.0 - self.p))

    def describe(self) -> dict:
        return {"name": self.name, "p": self.p, "mu": self.mu}
