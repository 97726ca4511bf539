"""Small-system ground truth: exact posterior enumeration and Monte Carlo checks."""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from shared.config.config import config
from shared.domain.errors import StateSpaceTooLargeError
from shared.domain.models import (
    DiscretePrior,
    EnumerationResult,
    FiniteSizeMmsePoint,
    Instance,
    MonteCarloEstimate,
    NishimoriResult,
    frozen_array,
)
from shared.factories.rng_factory import create_rng
from simulation.services.instances import generate_instance
from theory.services.prior import posterior_mean

logger = logging.getLogger(__name__)

# configurations evaluated per vectorised block
_ENUMERATION_CHUNK = 1 << 14
_MIN_MC_SAMPLES = 1000


def _configurations(prior: DiscretePrior, n: int, start: int, stop: int) -> np.ndarray:
    """Signal configurations start..stop-1 in mixed-radix order (coordinate 0 fastest)."""
    index = np.arange(start, stop)[:, None]
    radix = prior.size ** np.arange(n)
    digits = (index // radix) % prior.size
    return digits


def exact_posterior(instance: Instance, prior: DiscretePrior,
                    max_states: Optional[int] = None) -> EnumerationResult:
    """E[X | W] and E[X X^T | W] by summing over every signal configuration.

    The log partition function is that of sum_x P0(x) exp(sum_{i<=j} (w_ij x_i x_j / sqrt(n)
    - x_i^2 x_j^2 / (2n)) / delta), i.e. the Gaussian likelihood without its
    x-independent factor.

    Raises:
        StateSpaceTooLargeError: If the prior size to the power n exceeds the cap
        ValueError: If delta is not positive
    """
    if not instance.delta > 0:
        raise ValueError(f"Enumeration needs a positive delta, got {instance.delta}")
    n = instance.n
    limit = max_states if max_states is not None else config.ENUMERATION_MAX_STATES
    states = prior.size**n
    if states > limit:
        raise StateSpaceTooLargeError(states, limit)

    w = np.asarray(instance.w_matrix)
    diag = np.diag(w)
    log_weights = np.log(prior.weights)
    scale = 1.0 / instance.delta

    log_norm = -np.inf
    first = np.zeros(n)
    second = np.zeros((n, n))
    for start in range(0, states, _ENUMERATION_CHUNK):
        digits = _configurations(prior, n, start, min(start + _ENUMERATION_CHUNK, states))
        x = prior.support[digits]
        x2 = x**2
        # sum_{i<=j} w_ij x_i x_j and sum_{i<=j} x_i^2 x_j^2 via full quadratic forms
        cross = 0.5 * (np.einsum("ki,ij,kj->k", x, w, x) + x2 @ diag)
        quartic = 0.5 * (x2.sum(axis=1) ** 2 + (x2**2).sum(axis=1))
        log_w = log_weights[digits].sum(axis=1) + scale * (cross / np.sqrt(n) - quartic / (2.0 * n))

        chunk_norm = float(logsumexp(log_w))
        merged = float(np.logaddexp(log_norm, chunk_norm))
        old_factor = np.exp(log_norm - merged) if np.isfinite(log_norm) else 0.0
        weights = np.exp(log_w - merged)
        first = old_factor * first + weights @ x
        second = old_factor * second + (x * weights[:, None]).T @ x
        log_norm = merged

    signal = np.asarray(instance.signal)
    pairwise = 0.5 * (second + second.T)
    vector_error = float(np.mean((signal - first) ** 2))
    matrix_error = float(np.sum((np.outer(signal, signal) - pairwise) ** 2) / n**2)
    return EnumerationResult(
        posterior_mean=frozen_array(first),
        pairwise_mean=frozen_array(pairwise),
        vector_error=vector_error,
        matrix_error=matrix_error,
        log_partition=log_norm,
        states=states,
    )


def _check_samples(samples: int) -> None:
    if samples < _MIN_MC_SAMPLES:
        raise ValueError(f"Need at least {_MIN_MC_SAMPLES} samples, got {samples}")


def _streamed_mean(values_by_chunk) -> MonteCarloEstimate:
    total, total_sq, count = 0.0, 0.0, 0
    for values in values_by_chunk:
        total += float(values.sum())
        total_sq += float((values**2).sum())
        count += values.size
    mean = total / count
    variance = max(total_sq / count - mean**2, 0.0) * count / (count - 1)
    return MonteCarloEstimate(estimate=mean, stderr=float(np.sqrt(variance / count)))


def _channel_draws(prior: DiscretePrior, samples: int, rng_seed: int):
    """Chunks of (S, Z) draws for the scalar channel."""
    rng = create_rng(rng_seed, 3)
    chunk = max(config.MC_CHUNK_SIZE, 1)
    for start in range(0, samples, chunk):
        size = min(chunk, samples - start)
        yield rng.choice(prior.support, size=size, p=prior.weights), rng.standard_normal(size)


def mc_mmse(prior: DiscretePrior, snr: float, samples: int, rng_seed: int) -> MonteCarloEstimate:
    """Monte Carlo mean of (S - E[X | S + Z / sqrt(snr)])^2 with its standard error."""
    _check_samples(samples)
    if not snr >= 0:
        raise ValueError(f"snr must be non-negative, got {snr}")
    sigma2 = np.inf if snr == 0 else 1.0 / snr

    def errors():
        for s, z in _channel_draws(prior, samples, rng_seed):
            y = s if snr == 0 else s + z * np.sqrt(sigma2)
            yield (s - posterior_mean(prior, y, sigma2)) ** 2

    return _streamed_mean(errors())


def mc_free_entropy(prior: DiscretePrior, snr: float, samples: int,
                    rng_seed: int) -> MonteCarloEstimate:
    """Monte Carlo E ln sum_a p_a exp(-snr a^2 / 2 + snr a S + sqrt(snr) a Z)."""
    _check_samples(samples)
    a = prior.support

    def terms():
        for s, z in _channel_draws(prior, samples, rng_seed):
            exponent = np.log(prior.weights) + (-0.5 * snr * a**2 + snr * a * s[:, None]
                                                 + np.sqrt(snr) * a * z[:, None])
            yield logsumexp(exponent, axis=1)

    return _streamed_mean(terms())


def nishimori_check(prior: DiscretePrior, n: int, delta: float, num_instances: int,
                    rng_seed: int) -> NishimoriResult:
    """Average E[S_i S_j <X_i X_j>] and E[<X_i X_j>^2] over pairs and fresh instances.

    The stderr is that of the per-instance difference of the two sides.
    """
    if num_instances < 2:
        raise ValueError(f"Need at least 2 instances, got {num_instances}")
    lhs, rhs = np.empty(num_instances), np.empty(num_instances)
    for k in range(num_instances):
        instance = generate_instance(prior, n, delta, rng_seed, stream=k)
        pairwise = exact_posterior(instance, prior).pairwise_mean
        signal = np.asarray(instance.signal)
        lhs[k] = float(np.mean(np.outer(signal, signal) * pairwise))
        rhs[k] = float(np.mean(pairwise**2))
    stderr = float(np.std(lhs - rhs, ddof=1) / np.sqrt(num_instances))
    logger.info(f"Nishimori n={n} delta={delta:.6g}: lhs={lhs.mean():.6g} rhs={rhs.mean():.6g}")
    return NishimoriResult(lhs=float(lhs.mean()), rhs=float(rhs.mean()), stderr=stderr)


def finite_size_mmse_curve(prior: DiscretePrior, n: int, delta_grid: Sequence[float],
                           num_instances: int, rng_seed: int) -> List[FiniteSizeMmsePoint]:
    """Exact per-instance posterior errors averaged over instances at each delta."""
    if num_instances < 2:
        raise ValueError(f"Need at least 2 instances, got {num_instances}")
    points = []
    for d, delta in enumerate(delta_grid):
        matrix_errors, vector_errors = np.empty(num_instances), np.empty(num_instances)
        for k in range(num_instances):
            instance = generate_instance(prior, n, delta, rng_seed, stream=d * num_instances + k)
            result = exact_posterior(instance, prior)
            matrix_errors[k], vector_errors[k] = result.matrix_error, result.vector_error
        root = np.sqrt(num_instances)
        points.append(FiniteSizeMmsePoint(
            delta=float(delta),
            matrix_mmse=float(matrix_errors.mean()),
            matrix_stderr=float(matrix_errors.std(ddof=1) / root),
            vector_mmse=float(vector_errors.mean()),
            vector_stderr=float(vector_errors.std(ddof=1) / root),
        ))
    return points
