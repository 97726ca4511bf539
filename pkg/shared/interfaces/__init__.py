"""Abstract interfaces and contracts."""

from shared.interfaces.output_channel import OutputChannel

__all__ = ["OutputChannel"]
