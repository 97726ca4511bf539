"""Output channel implementations."""

from shared.implementations.channels.bernoulli_edge import BernoulliEdgeChannel
from shared.implementations.channels.gaussian import GaussianChannel
from shared.implementations.channels.scaled_gaussian import ScaledGaussianChannel

__all__ = ["BernoulliEdgeChannel", "GaussianChannel", "ScaledGaussianChannel"]
