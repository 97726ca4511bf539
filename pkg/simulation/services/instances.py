"""Synthetic spiked Wigner instances, plain and spatially coupled."""

import logging

import numpy as np

from shared.domain.models import BlockStructure, DiscretePrior, Instance, frozen_array
from shared.factories.rng_factory import create_rng
from theory.services.coupling import seed_blocks, triangle_coupling

logger = logging.getLogger(__name__)


def _symmetric_noise(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal entries drawn for i <= j and mirrored."""
    upper = np.triu(rng.standard_normal((size, size)))
    return upper + np.triu(upper, 1).T


def _sample_signal(prior: DiscretePrior, rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.choice(prior.support, size=size, p=prior.weights)


def generate_instance(prior: DiscretePrior, n: int, delta: float, rng_seed: int,
                      stream: int = 0) -> Instance:
    """W = s s^T / sqrt(n) + sqrt(delta) Z with s i.i.d. from the prior.

    Raises:
        ValueError: If n < 2 or delta < 0
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not delta >= 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    rng = create_rng(rng_seed, stream)
    signal = _sample_signal(prior, rng, n)
    w_matrix = np.outer(signal, signal) / np.sqrt(n)
    if delta > 0:
        w_matrix += np.sqrt(delta) * _symmetric_noise(rng, n)
    return Instance(n=n, w_matrix=frozen_array(w_matrix), signal=frozen_array(signal), delta=delta)


def generate_coupled_instance(prior: DiscretePrior, n: int, length: int, window: int,
                              delta: float, rng_seed: int, stream: int = 0) -> Instance:
    """Ring of L + 1 blocks of n variables; block (mu, nu) carries s s^T sqrt(Lambda_{mu nu} / n).

    Signal values on the seed blocks are known side information.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not delta >= 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    coupling = triangle_coupling(length, window)
    blocks = coupling.size
    block_of = np.repeat(np.arange(blocks), n)
    rng = create_rng(rng_seed, stream)
    signal = _sample_signal(prior, rng, n * blocks)

    scale = np.sqrt(coupling.matrix[np.ix_(block_of, block_of)] / n)
    w_matrix = np.outer(signal, signal) * scale
    if delta > 0:
        w_matrix += np.sqrt(delta) * _symmetric_noise(rng, n * blocks)
    structure = BlockStructure(
        coupling=coupling,
        block_size=n,
        block_of=frozen_array(block_of, dtype=int),
        seed_blocks=seed_blocks(length, window),
    )
    logger.debug(f"Coupled instance: {blocks} blocks of {n}, window {window}")
    return Instance(
        n=n * blocks,
        w_matrix=frozen_array(w_matrix),
        signal=frozen_array(signal),
        delta=delta,
        blocks=structure,
    )
