"""Configuration management."""

from shared.config.config import config, Config, WORKERS_ENV

__all__ = ["config", "Config", "WORKERS_ENV"]
