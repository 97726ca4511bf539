"""Channel universality: effective Gaussian noise and the two-community prior."""

import logging
import math
from typing import Optional

import numpy as np

from shared.config.config import config
from shared.domain.consts import FisherMethod
from shared.domain.models import DiscretePrior, EffectiveNoise
from shared.factories.rng_factory import create_rng
from shared.interfaces.output_channel import OutputChannel
from theory.services.prior import make_prior

logger = logging.getLogger(__name__)

NON_INFORMATIVE_NOTE = "non-informative channel"


def _from_fisher(fisher: float, stderr_fisher: float, method: FisherMethod) -> EffectiveNoise:
    if fisher <= 0.0:
        logger.warning(f"Fisher information is {fisher!r}; channel carries no information")
        return EffectiveNoise(value=math.inf, stderr=math.inf, method=method, note=NON_INFORMATIVE_NOTE)
    return EffectiveNoise(value=1.0 / fisher, stderr=stderr_fisher / fisher**2, method=method)


def monte_carlo_fisher(channel: OutputChannel, samples: int, seed: int, step: float):
    """E_{P_out(w|0)}[(d/dy log P_out(w|y) at 0)^2] and its standard error.

    The score is a central finite difference with step ``step``.
    """
    rng = create_rng(seed, 0)
    outputs = channel.sample(np.zeros(samples), rng)
    score = (
        channel.log_likelihood(outputs, np.full(samples, step))
        - channel.log_likelihood(outputs, np.full(samples, -step))
    ) / (2.0 * step)
    squared = score**2
    return float(squared.mean()), float(squared.std(ddof=1) / math.sqrt(samples))


def effective_noise(channel: OutputChannel, samples: Optional[int] = None, seed: int = 0,
                    step: Optional[float] = None, force_monte_carlo: bool = False) -> EffectiveNoise:
    """Inverse Fisher information of the channel at y = 0.

    Uses the channel's closed form when it declares one, otherwise a Monte
    Carlo average of the squared finite-difference score.
    """
    analytic = None if force_monte_carlo else channel.fisher_information()
    if analytic is not None:
        return _from_fisher(float(analytic), 0.0, FisherMethod.ANALYTIC)

    samples = samples if samples is not None else config.FISHER_MC_SAMPLES
    step = step if step is not None else config.FISHER_FD_STEP
    if samples < 2:
        raise ValueError(f"Need at least 2 Monte Carlo samples, got {samples}")
    fisher, stderr = monte_carlo_fisher(channel, samples, seed, step)
    logger.debug(f"{channel.name}: Monte Carlo Fisher information {fisher:.8g} +- {stderr:.2g}")
    return _from_fisher(fisher, stderr, FisherMethod.MONTE_CARLO)


def community_detection_prior(rho: float) -> DiscretePrior:
    """rho delta(s - sqrt((1-rho)/rho)) + (1-rho) delta(s + sqrt(rho/(1-rho))); mean 0, v = 1."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return make_prior(
        [math.sqrt((1.0 - rho) / rho), -math.sqrt(rho / (1.0 - rho))],
        [rho, 1.0 - rho],
    )
