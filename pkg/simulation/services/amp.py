"""Bayes-optimal AMP for symmetric rank-one estimation, plain or spatially coupled.

With A = W / sqrt(n) (times sqrt(Lambda) per block pair when coupled) the
iteration is

    r^t     = A x^t - b^t * x^{t-1}
    x^{t+1} = E[X | r^t / m_t = X + N(0, delta / m_t)]

where m_t is the overlap per block smoothed by Lambda and b^t is the
Lambda-smoothed mean posterior variance (the Onsager term). An uncoupled
instance is the one-block ring with Lambda = [[1]].
"""

import logging
from typing import Optional

import numpy as np

from shared.config.config import config
from shared.domain.consts import EffectiveNoiseMode
from shared.domain.models import AmpState, DiscretePrior, Instance, QuadratureRule
from shared.domain.status import RunStatus
from shared.factories.rng_factory import create_rng
from simulation.services.metrics import vector_mse
from theory.services.coupling import coupled_se_run, triangle_coupling
from theory.services.prior import default_quadrature, posterior_mean, posterior_variance
from theory.services.state_evolution import se_run

logger = logging.getLogger(__name__)


class _Layout:
    """Block bookkeeping shared by the plain and coupled cases."""

    def __init__(self, instance: Instance):
        if instance.blocks is None:
            self.coupling = np.ones((1, 1))
            self.block_size = instance.n
            self.block_of = np.zeros(instance.n, dtype=int)
            self.seed = np.zeros(instance.n, dtype=bool)
            self.matrix = instance.w_matrix / np.sqrt(instance.n)
            self.length, self.window = 0, 0
        else:
            blocks = instance.blocks
            self.coupling = blocks.coupling.matrix
            self.block_size = blocks.block_size
            self.block_of = np.asarray(blocks.block_of)
            self.seed = blocks.seed_mask
            weights = np.sqrt(self.coupling[np.ix_(self.block_of, self.block_of)])
            self.matrix = instance.w_matrix * weights / np.sqrt(self.block_size)
            self.length, self.window = blocks.coupling.length, blocks.coupling.window
        self.blocks = self.coupling.shape[0]

    def block_mean(self, values: np.ndarray) -> np.ndarray:
        return np.bincount(self.block_of, weights=values, minlength=self.blocks) / self.block_size


def _se_schedule(prior: DiscretePrior, instance: Instance, layout: _Layout, steps: int,
                 quad: QuadratureRule) -> np.ndarray:
    """Per-block SE energies E^0, E^1, ... as rows; the last row repeats if SE stops early."""
    if layout.blocks == 1:
        trajectory = se_run(prior, instance.delta, max_iter=steps, quad=quad)
        return np.asarray(trajectory.iterates)[:, None]
    run = coupled_se_run(
        prior, layout.length, layout.window, instance.delta, max_iter=steps, quad=quad,
        coupling=triangle_coupling(layout.length, layout.window), record_history=True,
    )
    return np.asarray(run.history)


def _denoise(prior: DiscretePrior, field: np.ndarray, smoothed: np.ndarray, delta: float):
    """Posterior mean and variance of X given field = m X + N(0, delta m) per coordinate."""
    informative = smoothed > 0
    safe = np.where(informative, smoothed, 1.0)
    y = np.where(informative, field / safe, 0.0)
    sigma2 = np.where(informative, delta / safe, np.inf)
    return posterior_mean(prior, y, sigma2), posterior_variance(prior, y, sigma2)


def amp_run(instance: Instance, prior: DiscretePrior, max_iter: Optional[int] = None,
            tol: Optional[float] = None, damping: float = 0.0,
            noise_mode: EffectiveNoiseMode = EffectiveNoiseMode.EMPIRICAL,
            rng_seed: int = 0, quad: Optional[QuadratureRule] = None) -> AmpState:
    """Run AMP on one instance; ``mse_trace[t]`` is the vector MSE of x^t.

    x^0 is the prior mean plus a uniform perturbation of size
    ``config.AMP_INIT_SCALE * sqrt(v)``; seed-block coordinates of a coupled
    instance are pinned to the planted signal.

    The denoiser noise is delta / m_t with m_t = v - E_t, where E_t comes from
    the block means of (x^t)^2 by default. ``SE_SCHEDULE`` takes E_t from a
    precomputed state evolution run instead. mse_trace[t] is
    compared against E^{t+1}. A non-finite iterate ends the run as DIVERGED
    with the trace kept.

    Raises:
        ValueError: If delta is not positive or damping is outside [0, 1)
    """
    if not instance.delta > 0:
        raise ValueError(f"AMP needs a positive delta, got {instance.delta}")
    if not 0.0 <= damping < 1.0:
        raise ValueError(f"damping must lie in [0, 1), got {damping}")
    max_iter = max_iter if max_iter is not None else config.AMP_MAX_ITER
    tol = tol if tol is not None else config.AMP_TOL
    quad = default_quadrature(quad)
    layout = _Layout(instance)
    signal = np.asarray(instance.signal)
    v = prior.second_moment

    rng = create_rng(rng_seed, 1)
    estimate = prior.mean + config.AMP_INIT_SCALE * np.sqrt(v) * rng.uniform(-1.0, 1.0, instance.n)
    estimate[layout.seed] = signal[layout.seed]
    variance = np.zeros(instance.n)
    state = AmpState(estimate=estimate, previous=np.zeros(instance.n))
    state.mse_trace.append(vector_mse(estimate, signal))

    schedule = None
    if noise_mode == EffectiveNoiseMode.SE_SCHEDULE:
        schedule = _se_schedule(prior, instance, layout, max_iter + 2, quad)

    for t in range(max_iter):
        if schedule is not None:
            energies = schedule[min(t + 1, schedule.shape[0] - 1)]
            overlap = np.maximum(v - energies, 0.0)
        else:
            overlap = layout.block_mean(state.estimate**2)
        smoothed = layout.coupling @ overlap
        onsager = layout.coupling @ layout.block_mean(variance)

        field = layout.matrix @ state.estimate - onsager[layout.block_of] * state.previous
        new_estimate, new_variance = _denoise(
            prior, field, smoothed[layout.block_of], instance.delta
        )
        new_estimate = np.atleast_1d(new_estimate)
        new_variance = np.atleast_1d(new_variance)
        new_estimate[layout.seed] = signal[layout.seed]
        new_variance[layout.seed] = 0.0
        if damping > 0:
            new_estimate = (1.0 - damping) * new_estimate + damping * state.estimate

        state.iterations = t + 1
        state.effective_noise.append(
            np.where(smoothed > 0, instance.delta / np.where(smoothed > 0, smoothed, 1.0), np.inf)
        )
        if not np.all(np.isfinite(new_estimate)):
            logger.warning(f"AMP diverged at iteration {t + 1}")
            state.status = RunStatus.DIVERGED
            break

        change = float(np.sqrt(np.mean((new_estimate - state.estimate) ** 2)))
        state.previous, state.estimate = state.estimate, new_estimate
        variance = new_variance
        state.mse_trace.append(vector_mse(new_estimate, signal))
        logger.debug(f"AMP t={t + 1} mse={state.mse_trace[-1]:.6g} change={change:.3g}")
        if change < tol:
            state.status = RunStatus.CONVERGED
            break

    if state.status == RunStatus.NOT_CONVERGED:
        logger.info(f"AMP stopped after {state.iterations} iterations without converging")
    return state
