"""Factory for creating output channel instances."""

from shared.domain.consts import ChannelName
from shared.implementations.channels import (
    BernoulliEdgeChannel,
    GaussianChannel,
    ScaledGaussianChannel,
)
from shared.interfaces.output_channel import OutputChannel


CHANNELS: dict[str, type[OutputChannel]] = {
    ChannelName.GAUSSIAN: GaussianChannel,
    ChannelName.BERNOULLI_EDGE: BernoulliEdgeChannel,
    ChannelName.SCALED_GAUSSIAN: ScaledGaussianChannel,
}


def create_channel(channel_name: str, **params: float) -> OutputChannel:
    """Factory for creating output channels.

    Returns:
        OutputChannel instance built with ``params``

    Raises:
        ValueError: If channel_name is unknown
    """
    try:
        channel_cls = CHANNELS[channel_name]
    except KeyError:
        raise ValueError(f"Unknown channel: {channel_name}")
    return channel_cls(**params)
