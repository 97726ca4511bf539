"""Random streams derived from a master seed."""

import numpy as np


def create_rng(master_seed: int, counter: int = 0) -> np.random.Generator:
    """Independent generator for stream ``counter`` of ``master_seed``."""
    if master_seed < 0 or counter < 0:
        raise ValueError(f"Seed and counter must be non-negative, got {master_seed}, {counter}")
    return np.random.default_rng(np.random.SeedSequence([master_seed, counter]))
