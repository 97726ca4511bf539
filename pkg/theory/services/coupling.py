"""Spatially coupled state evolution on a ring of L + 1 blocks."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.fft import fft
from scipy.linalg import circulant

from shared.config.config import config
from shared.domain.models import (
    CoupledProfile,
    CoupledRun,
    CouplingMatrix,
    DiscretePrior,
    QuadratureRule,
    SaturationPoint,
    SaturationResult,
    ShiftDiagnostic,
    frozen_array,
)
from shared.domain.payloads import Thresholds
from shared.domain.status import RunStatus
from theory.services.potential import i_rs
from theory.services.prior import default_quadrature, free_entropy, mmse
from theory.services.thresholds import compute_thresholds, good_branch

logger = logging.getLogger(__name__)

_STOCHASTIC_TOL = 1e-12


def _triangle_weights(window: int) -> np.ndarray:
    """Kernel values at circular distance 0..w."""
    distance = np.arange(window + 1)
    return (1.0 - distance / (window + 1)) / (window + 1)


def triangle_coupling(length: int, window: int) -> CouplingMatrix:
    """Circulant kernel: a triangle of base 2w + 1 and height 1 / (w + 1).

    Raises:
        ValueError: If L is negative or odd, or w is outside [0, L/2]
    """
    if length < 0 or length % 2 != 0:
        raise ValueError(f"Ring parameter L must be even and non-negative, got {length}")
    if window < 0 or 2 * window > length:
        raise ValueError(f"Window w={window} must lie in [0, L/2={length // 2}]")
    weights = _triangle_weights(window)
    column = np.zeros(length + 1)
    column[0] = weights[0]
    for distance in range(1, window + 1):
        column[distance] = weights[distance]
        column[-distance] = weights[distance]
    if abs(column.sum() - 1.0) > _STOCHASTIC_TOL:
        raise ValueError(f"Kernel rows sum to {column.sum()!r}, expected 1")
    return CouplingMatrix(matrix=frozen_array(circulant(column)), window=window)


def fully_connected_coupling(length: int) -> CouplingMatrix:
    """Uniform kernel 1 / (L + 1): the w = L/2 end of the window interpolation."""
    if length < 0 or length % 2 != 0:
        raise ValueError(f"Ring parameter L must be even and non-negative, got {length}")
    size = length + 1
    return CouplingMatrix(matrix=frozen_array(np.full((size, size), 1.0 / size)), window=length // 2)


def coupling_conditions(coupling: CouplingMatrix) -> Dict[str, bool]:
    """Check the five structural requirements on a coupling kernel."""
    matrix = coupling.matrix
    size, window = coupling.size, coupling.window
    first_row = matrix[0]
    distance = np.arange(size)
    circular = np.minimum(distance, size - distance)

    rolled = np.array([np.roll(first_row, k) for k in range(size)])
    spectrum = fft(first_row)
    steps = np.abs(np.diff(matrix, axis=0))
    return {
        "doubly_stochastic": bool(
            np.all(matrix >= 0)
            and np.allclose(matrix.sum(axis=0), 1.0, atol=_STOCHASTIC_TOL, rtol=0)
            and np.allclose(matrix.sum(axis=1), 1.0, atol=_STOCHASTIC_TOL, rtol=0)
        ),
        "circulant_symmetric": bool(np.allclose(rolled, matrix) and np.allclose(matrix, matrix.T)),
        "window_support": bool(np.all(first_row[circular > window] == 0.0)),
        "smooth": bool(steps.max(initial=0.0) <= 1.0 / (window + 1) ** 2 + _STOCHASTIC_TOL),
        "nonnegative_spectrum": bool(
            np.all(spectrum.real >= -_STOCHASTIC_TOL)
            and np.allclose(spectrum.imag, 0.0, atol=1e-10)
        ),
    }


def seed_blocks(length: int, window: int) -> Tuple[int, ...]:
    """B = {0, .., w-1} u {L-w, .., L}."""
    return tuple(sorted(set(range(window)) | set(range(length - window, length + 1))))


def initial_profile(prior: DiscretePrior, length: int, seed: Sequence[int]) -> CoupledProfile:
    values = np.full(length + 1, prior.second_moment)
    values[list(seed)] = 0.0
    return CoupledProfile(values=frozen_array(values), seed=tuple(seed))


def _block_snr(prior: DiscretePrior, values: np.ndarray, coupling: CouplingMatrix,
               delta: float) -> np.ndarray:
    if values.size != coupling.size:
        raise ValueError(f"Profile has {values.size} blocks, coupling has {coupling.size}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return np.maximum(prior.second_moment - coupling.matrix @ values, 0.0) / delta


def coupled_se_step(prior: DiscretePrior, profile: CoupledProfile, coupling: CouplingMatrix,
                    delta: float, quad: Optional[QuadratureRule] = None) -> CoupledProfile:
    """E_mu <- mmse((v - (Lambda E)_mu) / delta); seed blocks stay at 0."""
    updated = np.asarray(mmse(prior, _block_snr(prior, profile.values, coupling, delta), quad))
    updated = np.atleast_1d(updated).copy()
    updated[list(profile.seed)] = 0.0
    return CoupledProfile(values=frozen_array(updated), seed=profile.seed)


def coupled_se_run(prior: DiscretePrior, length: int, window: int, delta: float,
                   tol: Optional[float] = None, max_iter: Optional[int] = None,
                   quad: Optional[QuadratureRule] = None,
                   coupling: Optional[CouplingMatrix] = None,
                   record_history: bool = False) -> CoupledRun:
    """Iterate coupled SE from E_mu = v outside the seed until the sup-norm step is below tol."""
    tol = tol if tol is not None else config.SE_TOL
    max_iter = max_iter if max_iter is not None else config.SE_MAX_ITER
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    quad = default_quadrature(quad)
    coupling = coupling or triangle_coupling(length, window)
    profile = initial_profile(prior, length, seed_blocks(length, window))
    history: List[np.ndarray] = [profile.values] if record_history else []

    status = RunStatus.NOT_CONVERGED
    iterations = 0
    for iterations in range(1, max_iter + 1):
        step = coupled_se_step(prior, profile, coupling, delta, quad)
        values = np.minimum(step.values, profile.values)
        change = float(np.max(np.abs(values - profile.values)))
        profile = CoupledProfile(values=frozen_array(values), seed=profile.seed)
        if record_history:
            history.append(profile.values)
        if change < tol:
            status = RunStatus.CONVERGED
            break

    if status != RunStatus.CONVERGED:
        logger.warning(
            f"Coupled SE (L={length}, w={window}) did not converge at delta={delta:.6g}"
        )
    else:
        logger.debug(f"Coupled SE (L={length}, w={window}) delta={delta:.6g}: {iterations} iterations")
    return CoupledRun(
        profile=profile,
        iterations=iterations,
        status=status,
        history=frozen_array(history) if record_history else None,
    )


def coupled_potential(prior: DiscretePrior, profile: CoupledProfile, coupling: CouplingMatrix,
                      delta: float, quad: Optional[QuadratureRule] = None) -> float:
    """i_{w,L}(E) = sum_mu [sum_nu Lambda (v - E_mu)(v - E_nu) / (4 delta) - F(snr_mu)].

    The constant (2w + 1) L v^2 / (4 delta) is left out, so a flat profile
    with w = 0 gives (L + 1) (i_RS(E) - v^2 / (4 delta)).
    """
    values = profile.values
    snr = _block_snr(prior, values, coupling, delta)
    gap = prior.second_moment - values
    quadratic = gap @ coupling.matrix @ gap / (4.0 * delta)
    return float(quadratic - np.sum(free_entropy(prior, snr, quad)))


def interior_blocks(profile: CoupledProfile) -> np.ndarray:
    return profile.values[~profile.seed_mask]


def threshold_saturation_experiment(prior: DiscretePrior, window: int, length: int,
                                    delta_grid: Sequence[float],
                                    thresholds: Optional[Thresholds] = None,
                                    tol: Optional[float] = None,
                                    max_iter: Optional[int] = None,
                                    bisection_steps: int = 12,
                                    quad: Optional[QuadratureRule] = None) -> SaturationResult:
    """Largest delta whose coupled fixed point stays on the good branch in every block.

    The grid is scanned in increasing order and the first saturated/unsaturated
    crossing is refined by bisection. Without a crossing the relevant grid end
    is reported and ``bracketed`` is False.
    """
    if not delta_grid:
        raise ValueError("delta_grid is empty")
    quad = default_quadrature(quad)
    thresholds = thresholds or compute_thresholds(prior, quad)
    coupling = triangle_coupling(length, window)

    def evaluate(delta: float) -> SaturationPoint:
        run = coupled_se_run(prior, length, window, delta, tol, max_iter, quad, coupling)
        worst = float(np.max(interior_blocks(run.profile), initial=0.0))
        e_good = good_branch(prior, delta, thresholds, quad)
        saturated = e_good is not None and worst <= e_good + config.SATURATION_TOL
        return SaturationPoint(
            delta=delta,
            max_interior=worst,
            e_good=float("nan") if e_good is None else e_good,
            saturated=saturated,
            status=run.status,
        )

    points = [evaluate(delta) for delta in sorted(delta_grid)]
    crossing = next((k for k, p in enumerate(points) if not p.saturated), None)
    if crossing is None or crossing == 0:
        edge = points[-1].delta if crossing is None else points[0].delta
        logger.warning(f"No saturation crossing on the grid (w={window}, L={length}); reporting {edge:.8g}")
        return SaturationResult(window=window, length=length, points=tuple(points),
                                delta_amp_coupled=edge, bracketed=False)

    low, high = points[crossing - 1].delta, points[crossing].delta
    for _ in range(bisection_steps):
        mid = 0.5 * (low + high)
        if evaluate(mid).saturated:
            low = mid
        else:
            high = mid
    logger.info(f"Coupled threshold (w={window}, L={length}): {low:.10g}")
    return SaturationResult(window=window, length=length, points=tuple(points),
                            delta_amp_coupled=low, bracketed=True)


def saturated_profile(profile: CoupledProfile, window: int, e_good: float) -> Tuple[np.ndarray, int, int]:
    """Saturated profile of a fixed point, padded with constants on both sides.

    Left of mu_inf the profile is E_good, between mu_inf and mu_max it copies
    the fixed point, from mu_max on it is E_{mu_max}.

    Raises:
        ValueError: If the fixed point never exceeds E_good
    """
    values = profile.values
    length = values.size - 1
    bulk = np.arange(window, length - window)
    mu_max = int(bulk[np.argmax(values[bulk])])
    top = float(values[mu_max])
    if top <= e_good:
        raise ValueError(f"Fixed point stays below E_good={e_good:.6g}; nothing to saturate")
    above = np.nonzero(values[: mu_max + 1] > e_good)[0]
    mu_inf = int(above[0]) - 1
    pad = 2 * (window + 1)
    saturated = np.concatenate([
        np.full(pad, e_good),
        values[mu_inf + 1: mu_max],
        np.full(pad + 1, top),
    ])
    return saturated, mu_inf, mu_max


def _line_potential(prior: DiscretePrior, values: np.ndarray, window: int, delta: float,
                    quad: QuadratureRule) -> float:
    """Sum of per-block coupled potential terms over blocks with a complete window."""
    weights = _triangle_weights(window)
    kernel = np.concatenate([weights[:0:-1], weights])
    effective = np.convolve(values, kernel, mode="valid")
    centre = values[window: values.size - window]
    v = prior.second_moment
    snr = np.maximum(v - effective, 0.0) / delta
    terms = (v - centre) * (v - effective) / (4.0 * delta) - free_entropy(prior, snr, quad)
    return float(np.sum(terms))


def shift_diagnostic(prior: DiscretePrior, profile: CoupledProfile, window: int, delta: float,
                     e_good: float, quad: Optional[QuadratureRule] = None) -> ShiftDiagnostic:
    """Coupled potential change under a unit shift of the saturated profile.

    Compares it with i_RS(E_good) - i_RS(E_{mu_max}), the value the telescoping
    sum predicts.
    """
    quad = default_quadrature(quad)
    saturated, mu_inf, mu_max = saturated_profile(profile, window, e_good)
    shifted = np.concatenate([[e_good], saturated[:-1]])
    difference = (
        _line_potential(prior, shifted, window, delta, quad)
        - _line_potential(prior, saturated, window, delta, quad)
    )
    predicted = i_rs(prior, e_good, delta, quad) - i_rs(prior, saturated[-1], delta, quad)
    return ShiftDiagnostic(
        saturated=frozen_array(saturated),
        shifted=frozen_array(shifted),
        mu_infinity=mu_inf,
        mu_max=mu_max,
        potential_difference=float(difference),
        predicted_difference=float(predicted),
    )
