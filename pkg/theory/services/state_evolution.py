"""Scalar state evolution E^{t+1} = mmse((v - E^t) / delta) started from E^0 = v."""

import logging
from typing import Optional

import numpy as np

from shared.config.config import config
from shared.domain.models import DiscretePrior, QuadratureRule, SETrajectory, frozen_array
from shared.domain.status import RunStatus
from theory.services.prior import bias_zero_mean, default_quadrature, mmse

logger = logging.getLogger(__name__)

# step for the numerical slope of the SE map, in units of v
_SLOPE_STEP = 1e-6


def se_step(prior: DiscretePrior, energy: float, delta: float,
            quad: Optional[QuadratureRule] = None) -> float:
    """One SE update mmse((v - E) / delta).

    Raises:
        ValueError: If E is outside [0, v] or delta is not positive
    """
    v = prior.second_moment
    if not 0.0 <= energy <= v * (1.0 + 1e-12):
        raise ValueError(f"E must lie in [0, v={v}], got {energy}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return float(mmse(prior, max(v - energy, 0.0) / delta, quad))


def se_map_slope(prior: DiscretePrior, energy: float, delta: float,
                 quad: Optional[QuadratureRule] = None) -> float:
    """Central-difference derivative of the SE map at E (one-sided at the ends)."""
    v = prior.second_moment
    step = _SLOPE_STEP * v
    low, high = max(energy - step, 0.0), min(energy + step, v)
    if high <= low:
        return 0.0
    return (se_step(prior, high, delta, quad) - se_step(prior, low, delta, quad)) / (high - low)


def se_run(prior: DiscretePrior, delta: float, tol: Optional[float] = None,
           max_iter: Optional[int] = None,
           quad: Optional[QuadratureRule] = None) -> SETrajectory:
    """Iterate SE from E^0 = v until a stable fixed point is reached.

    Zero-mean priors are run on a copy biased by ``config.ZERO_MEAN_BIAS`` so
    that E = v stops being a fixed point; reported iterates are clipped to
    the unbiased [0, v]. A step below ``tol`` only stops the run when the SE
    map is contracting there, so the slow start near an unstable E = v is not
    mistaken for convergence.
    """
    tol = tol if tol is not None else config.SE_TOL
    max_iter = max_iter if max_iter is not None else config.SE_MAX_ITER
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    quad = default_quadrature(quad)
    v = prior.second_moment
    working = bias_zero_mean(prior, config.ZERO_MEAN_BIAS) if prior.is_zero_mean else prior
    v_working = working.second_moment

    iterates = [v_working]
    status = RunStatus.NOT_CONVERGED
    for iteration in range(1, max_iter + 1):
        current = iterates[-1]
        nxt = min(se_step(working, current, delta, quad), current)
        iterates.append(nxt)
        if abs(nxt - current) < tol and se_map_slope(working, nxt, delta, quad) <= 1.0:
            status = RunStatus.CONVERGED
            break
        if iteration % 1000 == 0:
            logger.debug(f"SE delta={delta:.6g} t={iteration} E={nxt:.12g}")

    if status != RunStatus.CONVERGED:
        logger.warning(f"SE did not converge at delta={delta:.6g} after {max_iter} iterations")
    values = np.clip(np.array(iterates), 0.0, v)
    return SETrajectory(
        delta=delta,
        iterates=frozen_array(values),
        converged=status == RunStatus.CONVERGED,
        fixed_point=float(values[-1]),
        status=status,
    )
