"""Spectral baseline: top eigenvector of W / sqrt(n) by power iteration."""

import logging
from typing import Optional

import numpy as np

from shared.config.config import config
from shared.domain.models import DiscretePrior, Instance, SpectralResult, frozen_array
from shared.domain.status import RunStatus
from shared.factories.rng_factory import create_rng
from simulation.services.metrics import overlap

logger = logging.getLogger(__name__)


def power_iteration(matrix: np.ndarray, rng: np.random.Generator, tol: float, max_iter: int):
    """Dominant eigenpair with the residual ||M x - lambda x|| as stopping test.

    Returns (eigenvalue, unit vector, iterations, converged).
    """
    size = matrix.shape[0]
    x = rng.standard_normal(size)
    x /= np.linalg.norm(x)
    eigenvalue = 0.0
    for iteration in range(1, max_iter + 1):
        y = matrix @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            x = rng.standard_normal(size)
            x /= np.linalg.norm(x)
            continue
        x = y / norm
        mx = matrix @ x
        eigenvalue = float(x @ mx)
        if np.linalg.norm(mx - eigenvalue * x) < tol:
            return eigenvalue, x, iteration, True
    return eigenvalue, x, max_iter, False


def spectral_estimate(instance: Instance, prior: DiscretePrior, rng_seed: int = 0,
                      tol: Optional[float] = None,
                      max_iter: Optional[int] = None) -> SpectralResult:
    """Top eigenvector scaled to ||x||^2 = n v and its overlap with the signal.

    Not converging within ``max_iter`` steps is reported through the status.
    """
    if instance.n < 2:
        raise ValueError(f"n must be at least 2, got {instance.n}")
    tol = tol if tol is not None else config.POWER_ITER_TOL
    max_iter = max_iter if max_iter is not None else config.POWER_ITER_MAX
    matrix = instance.w_matrix / np.sqrt(instance.n)
    eigenvalue, vector, iterations, converged = power_iteration(
        matrix, create_rng(rng_seed, 2), tol, max_iter
    )
    if not converged:
        logger.warning(f"Power iteration did not converge in {max_iter} steps")
    estimate = vector * np.sqrt(instance.n * prior.second_moment)
    return SpectralResult(
        estimate=frozen_array(estimate),
        overlap=overlap(estimate, instance.signal),
        eigenvalue=eigenvalue,
        iterations=iterations,
        status=RunStatus.CONVERGED if converged else RunStatus.NOT_CONVERGED,
    )
