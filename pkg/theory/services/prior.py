"""Discrete priors and the scalar AWGN channel quantities derived from them."""

import logging
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import logsumexp, softmax

from shared.config.config import config
from shared.domain.consts import Numerics
from shared.domain.models import DiscretePrior, QuadratureRule, frozen_array

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# snr values evaluated per vectorised block in mmse/overlap/free_entropy
_SNR_CHUNK = 512


def make_prior(support: Sequence[float], weights: Sequence[float]) -> DiscretePrior:
    """Build a validated, normalised prior with cached moments.

    Raises:
        ValueError: If support is empty, lengths differ, a weight is not
            positive and finite, or support points repeat
    """
    support_arr = np.asarray(support, dtype=float).ravel()
    weights_arr = np.asarray(weights, dtype=float).ravel()
    if support_arr.size == 0:
        raise ValueError("Prior support is empty")
    if support_arr.size != weights_arr.size:
        raise ValueError(
            f"Support ({support_arr.size}) and weights ({weights_arr.size}) differ in length"
        )
    if not np.all(np.isfinite(support_arr)):
        raise ValueError(f"Support points must be finite: {support_arr.tolist()}")
    if not np.all(np.isfinite(weights_arr)) or np.any(weights_arr <= 0):
        raise ValueError(f"Weights must be positive and finite: {weights_arr.tolist()}")
    if np.unique(support_arr).size != support_arr.size:
        raise ValueError(f"Duplicate support points: {support_arr.tolist()}")

    weights_arr = weights_arr / weights_arr.sum()
    mean = float(weights_arr @ support_arr)
    second_moment = float(weights_arr @ support_arr**2)
    variance = float(weights_arr @ (support_arr - mean) ** 2)
    entropy = float(-(weights_arr @ np.log(weights_arr)))
    return DiscretePrior(
        support=frozen_array(support_arr),
        weights=frozen_array(weights_arr),
        mean=mean,
        second_moment=second_moment,
        variance=variance,
        entropy=entropy,
    )


def dirac_prior(value: float = 1.0) -> DiscretePrior:
    return make_prior([value], [1.0])


def bernoulli_prior(rho: float) -> DiscretePrior:
    """Sparse prior (1 - rho) delta(s) + rho delta(s - 1)."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return make_prior([0.0, 1.0], [1.0 - rho, rho])


def rademacher_prior() -> DiscretePrior:
    return make_prior([-1.0, 1.0], [0.5, 0.5])


def bias_zero_mean(prior: DiscretePrior, epsilon: float) -> DiscretePrior:
    """Shift every support point by epsilon * sqrt(v) so that E = v stops being stationary."""
    shift = epsilon * np.sqrt(prior.second_moment)
    return make_prior(prior.support + shift, prior.weights)


@lru_cache(maxsize=16)
def gauss_hermite(order: int) -> QuadratureRule:
    """Gauss-Hermite rule for E[f(Z)], Z ~ N(0, 1), exact up to degree 2*order - 1."""
    if order <= 0:
        raise ValueError(f"Quadrature order must be positive, got {order}")
    nodes, weights = hermgauss(order)
    weights = weights / np.sqrt(np.pi)
    return QuadratureRule(
        nodes=frozen_array(np.sqrt(2.0) * nodes),
        weights=frozen_array(weights / weights.sum()),
        order=order,
    )


def default_quadrature(quad: Optional[QuadratureRule] = None) -> QuadratureRule:
    return quad if quad is not None else gauss_hermite(config.QUAD_ORDER)


def _posterior_weights(prior: DiscretePrior, y: np.ndarray, precision: np.ndarray) -> np.ndarray:
    """Posterior probabilities of each support point, last axis indexes the support."""
    a = prior.support
    exponent = np.log(prior.weights) + precision[..., None] * (
        a * y[..., None] - 0.5 * a**2
    )
    exponent = exponent - exponent.max(axis=-1, keepdims=True)
    np.clip(exponent, -Numerics.EXP_CLIP, 0.0, out=exponent)
    return softmax(exponent, axis=-1)


def _prepare_channel(y: ArrayLike, sigma2: ArrayLike):
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise ValueError("Channel output y must be finite")
    sigma2_arr = np.asarray(sigma2, dtype=float)
    if np.any(np.isnan(sigma2_arr)) or np.any(sigma2_arr <= 0):
        raise ValueError(f"sigma2 must be positive (inf allowed), got {sigma2}")
    precision = 1.0 / sigma2_arr
    y_arr, precision = np.broadcast_arrays(y_arr, precision)
    return y_arr, precision


def _as_output(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def posterior_mean(prior: DiscretePrior, y: ArrayLike, sigma2: ArrayLike):
    """E[X | S + sqrt(sigma2) Z = y], element-wise over y.

    sigma2 = inf returns the prior mean.
    """
    y_arr, precision = _prepare_channel(y, sigma2)
    probs = _posterior_weights(prior, y_arr, precision)
    return _as_output(probs @ prior.support)


def posterior_variance(prior: DiscretePrior, y: ArrayLike, sigma2: ArrayLike):
    """Var[X | y]; also sigma2 times the derivative of posterior_mean in y."""
    y_arr, precision = _prepare_channel(y, sigma2)
    probs = _posterior_weights(prior, y_arr, precision)
    mean = probs @ prior.support
    second = probs @ prior.support**2
    return _as_output(np.maximum(second - mean**2, 0.0))


def _validate_snr(snr: ArrayLike) -> np.ndarray:
    snr_arr = np.asarray(snr, dtype=float)
    if not np.all(np.isfinite(snr_arr)) or np.any(snr_arr < 0):
        raise ValueError(f"snr must be finite and non-negative, got {snr}")
    return snr_arr


def _scalar_channel_grid(prior: DiscretePrior, snr: np.ndarray, quad: QuadratureRule):
    """Exponents on the grid (snr, S, Z, alpha) for y = S + Z / sqrt(snr) scaled by snr."""
    a = prior.support
    s = snr[:, None, None, None]
    return (
        np.log(prior.weights)
        - 0.5 * s * a**2
        + s * a * a[:, None, None]
        + np.sqrt(s) * a * quad.nodes[None, :, None]
    )


def _reduce_over_snr(prior, snr, quad, reducer) -> np.ndarray:
    """Apply reducer(exponents) -> (chunk, S, Z) and average over S and Z."""
    flat = snr.ravel()
    out = np.empty(flat.size)
    for start in range(0, flat.size, _SNR_CHUNK):
        block = flat[start:start + _SNR_CHUNK]
        values = reducer(_scalar_channel_grid(prior, block, quad))
        out[start:start + block.size] = quad.expect(values) @ prior.weights
    return out.reshape(snr.shape)


def _posterior_means_from_exponents(prior: DiscretePrior, exponent: np.ndarray) -> np.ndarray:
    exponent = exponent - exponent.max(axis=-1, keepdims=True)
    np.clip(exponent, -Numerics.EXP_CLIP, 0.0, out=exponent)
    return softmax(exponent, axis=-1) @ prior.support


def mmse(prior: DiscretePrior, snr: ArrayLike, quad: Optional[QuadratureRule] = None):
    """E_{S,Z}[(S - E[X | S + Z/sqrt(snr)])^2], vectorised over snr.

    snr = 0 returns the prior variance exactly.
    """
    snr_arr = _validate_snr(snr)
    quad = default_quadrature(quad)
    if prior.size == 1:
        return _as_output(np.zeros(snr_arr.shape))

    def squared_error(exponent):
        means = _posterior_means_from_exponents(prior, exponent)
        return (prior.support[None, :, None] - means) ** 2

    values = _reduce_over_snr(prior, snr_arr, quad, squared_error)
    values = np.clip(values, 0.0, prior.variance)
    values = np.where(snr_arr == 0, prior.variance, values)
    return _as_output(values)


def overlap(prior: DiscretePrior, snr: ArrayLike, quad: Optional[QuadratureRule] = None):
    """E[<X>^2] = v - mmse(snr), evaluated directly so small values keep full precision."""
    snr_arr = _validate_snr(snr)
    quad = default_quadrature(quad)
    if prior.size == 1:
        return _as_output(np.full(snr_arr.shape, prior.second_moment))

    def squared_mean(exponent):
        return _posterior_means_from_exponents(prior, exponent) ** 2

    values = _reduce_over_snr(prior, snr_arr, quad, squared_mean)
    values = np.where(snr_arr == 0, prior.mean**2, values)
    return _as_output(values)


def free_entropy(prior: DiscretePrior, snr: ArrayLike, quad: Optional[QuadratureRule] = None):
    """E_{S,Z} ln sum_a p_a exp(-snr a^2/2 + snr a S + sqrt(snr) a Z).

    Its snr-derivative is (v - mmse(snr)) / 2.
    """
    snr_arr = _validate_snr(snr)
    quad = default_quadrature(quad)
    values = _reduce_over_snr(
        prior, snr_arr, quad, lambda exponent: logsumexp(exponent, axis=-1)
    )
    values = np.where(snr_arr == 0, 0.0, values)
    return _as_output(values)
