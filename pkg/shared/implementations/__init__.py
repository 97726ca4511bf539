"""Concrete implementations."""

from shared.implementations.channels import (
    BernoulliEdgeChannel,
    GaussianChannel,
    ScaledGaussianChannel,
)

__all__ = ["BernoulliEdgeChannel", "GaussianChannel", "ScaledGaussianChannel"]
