"""Factory functions."""

from shared.factories.channel_factory import CHANNELS, create_channel
from shared.factories.rng_factory import create_rng

__all__ = ["CHANNELS", "create_channel", "create_rng"]
