"""Two-community graphs and their Gaussian-equivalent spiked Wigner observation."""

import logging
import math

import numpy as np

from shared.domain.errors import LinkProbabilityError
from shared.domain.models import CommunityGraph, Instance, frozen_array
from shared.factories.rng_factory import create_rng
from theory.services.channels import community_detection_prior

logger = logging.getLogger(__name__)


def link_probabilities(rho: float, p: float, mu: float, n: int) -> dict:
    """Link probabilities inside group 1, across groups and inside group 2.

    Raises:
        LinkProbabilityError: If any of them leaves (0, 1)
    """
    root_n = math.sqrt(n)
    probabilities = {
        "first": p + mu * (1.0 - rho) / (rho * root_n),
        "across": p - mu / root_n,
        "second": p + mu * rho / ((1.0 - rho) * root_n),
    }
    for name, value in probabilities.items():
        if not 0.0 < value < 1.0:
            raise LinkProbabilityError(
                f"Link probability {name}={value:.6g} outside (0, 1) for "
                f"rho={rho}, p={p}, mu={mu}, n={n}"
            )
    return probabilities


def generate_community_graph(rho: float, p: float, mu: float, n: int,
                             rng_seed: int, stream: int = 0) -> CommunityGraph:
    """Symmetric adjacency with P(a_ij = 1) = p + mu s_i s_j / sqrt(n), no self-loops.

    The equivalent matrix (a - p) / mu is an observation of s s^T / sqrt(n)
    with effective noise p (1 - p) / mu^2. With mu = 0 it is only centred and
    the effective noise is infinite.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if mu < 0:
        raise ValueError(f"mu must be non-negative, got {mu}")
    link_probabilities(rho, p, mu, n)
    prior = community_detection_prior(rho)
    rng = create_rng(rng_seed, stream)
    in_first_group = rng.random(n) < rho
    signal = np.where(in_first_group, prior.support[0], prior.support[1])

    probability = p + mu * np.outer(signal, signal) / math.sqrt(n)
    draws = rng.random((n, n)) < probability
    adjacency = np.triu(draws, 1)
    adjacency = (adjacency | adjacency.T).astype(np.int8)

    centred = adjacency - p
    np.fill_diagonal(centred, 0.0)
    if mu > 0:
        equivalent = centred / mu
        delta_eff = p * (1.0 - p) / mu**2
    else:
        equivalent = centred
        delta_eff = math.inf
    logger.debug(f"Community graph n={n}: {int(adjacency.sum()) // 2} edges, delta_eff={delta_eff:.6g}")
    return CommunityGraph(
        adjacency=frozen_array(adjacency, dtype=np.int8),
        signal=frozen_array(signal),
        in_first_group=frozen_array(in_first_group, dtype=bool),
        equivalent_matrix=frozen_array(equivalent),
        delta_eff=delta_eff,
        rho=rho,
        p=p,
        mu=mu,
    )


def mu_for_delta(p: float, delta_eff: float) -> float:
    """Slope mu giving effective noise delta_eff: mu = sqrt(p (1 - p) / delta_eff)."""
    if not delta_eff > 0:
        raise ValueError(f"delta_eff must be positive, got {delta_eff}")
    return math.sqrt(p * (1.0 - p) / delta_eff)


def as_instance(graph: CommunityGraph) -> Instance:
    """The graph's Gaussian-equivalent observation as a spiked Wigner instance."""
    return Instance(
        n=graph.n,
        w_matrix=graph.equivalent_matrix,
        signal=graph.signal,
        delta=graph.delta_eff,
    )
