"""Replica-symmetric potential, its stationary points and the single-letter formulas."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from shared.config.config import config
from shared.domain.consts import BranchLabel, StationaryKind
from shared.domain.errors import NoStationaryPointError, TooManyStationaryPointsError
from shared.domain.models import (
    DiscretePrior,
    MutualInformation,
    PotentialCurve,
    QuadratureRule,
    StationaryPoint,
    StationaryPoints,
    frozen_array,
)
from theory.services.prior import default_quadrature, free_entropy, mmse

logger = logging.getLogger(__name__)

# relative offset used to read the sign of g on each side of a root
_SIDE_OFFSET = 1e-6
# one-sided limits at a discontinuity are read at delta * (1 -/+ this)
_LIMIT_OFFSET = 1e-6


def _validate_delta(delta: float) -> float:
    if not np.isfinite(delta) or delta <= 0:
        raise ValueError(f"delta must be positive and finite, got {delta}")
    return float(delta)


def _validate_energy(prior: DiscretePrior, energy) -> np.ndarray:
    e = np.asarray(energy, dtype=float)
    v = prior.second_moment
    slack = 1e-12 * max(v, 1.0)
    if np.any(~np.isfinite(e)) or np.any(e < -slack) or np.any(e > v + slack):
        raise ValueError(f"E must lie in [0, v={v}], got {energy}")
    return np.clip(e, 0.0, v)


def i_rs(prior: DiscretePrior, energy, delta: float, quad: Optional[QuadratureRule] = None):
    """i_RS(E; delta) = ((v - E)^2 + v^2) / (4 delta) - F((v - E) / delta).

    F is ``free_entropy``; at E = v the snr is exactly 0 and the value is v^2 / (4 delta).
    """
    delta = _validate_delta(delta)
    e = _validate_energy(prior, energy)
    v = prior.second_moment
    gap = v - e
    values = (gap**2 + v**2) / (4.0 * delta) - free_entropy(prior, gap / delta, quad)
    return float(values) if np.ndim(values) == 0 else values


def fixed_point_residual(prior: DiscretePrior, energy, delta: float,
                         quad: Optional[QuadratureRule] = None):
    """g(E) = E - mmse((v - E) / delta); i_RS'(E) = g(E) / (2 delta)."""
    e = _validate_energy(prior, energy)
    residual = e - mmse(prior, (prior.second_moment - e) / delta, quad)
    return float(residual) if np.ndim(residual) == 0 else residual


def potential_curve(prior: DiscretePrior, delta: float, points: int = 201,
                    quad: Optional[QuadratureRule] = None) -> PotentialCurve:
    """Sample i_RS on an evenly spaced grid of E in [0, v], endpoints included."""
    delta = _validate_delta(delta)
    if points < 2:
        raise ValueError(f"Need at least 2 curve points, got {points}")
    energies = np.linspace(0.0, prior.second_moment, points)
    values = i_rs(prior, energies, delta, quad)
    return PotentialCurve(
        delta=delta,
        energies=frozen_array(energies),
        values=frozen_array(np.atleast_1d(values)),
    )


def _sign_change_brackets(energies: np.ndarray, residual: np.ndarray) -> List[Tuple[float, float]]:
    product = residual[:-1] * residual[1:]
    idx = np.nonzero(product < 0)[0]
    return [(float(energies[i]), float(energies[i + 1])) for i in idx]


def _locate_roots(prior: DiscretePrior, delta: float, quad: QuadratureRule) -> List[float]:
    v = prior.second_moment
    scan = max(config.ROOT_SCAN_POINTS, 2)
    energies = np.linspace(0.0, v, scan)
    residual = np.atleast_1d(fixed_point_residual(prior, energies, delta, quad))
    if prior.is_zero_mean:
        # E = v is a fixed point exactly; rounding in the variance must not hide it
        residual[-1] = 0.0

    roots = [float(e) for e in energies[residual == 0.0]]
    step = energies[1] - energies[0]
    factor = max(config.ROOT_REFINE_FACTOR, 1)
    for low, high in _sign_change_brackets(energies, residual):
        # refine one cell either side so close pairs of roots separate
        fine_low, fine_high = max(low - step, 0.0), min(high + step, v)
        fine = np.linspace(fine_low, fine_high, 3 * factor + 1)
        fine_residual = np.atleast_1d(fixed_point_residual(prior, fine, delta, quad))
        roots.extend(float(e) for e in fine[fine_residual == 0.0])
        for a, b in _sign_change_brackets(fine, fine_residual):
            root = bisect(
                lambda e: fixed_point_residual(prior, e, delta, quad),
                a, b, xtol=config.ROOT_TOL,
            )
            roots.append(float(root))

    roots.sort()
    merged: List[float] = []
    for root in roots:
        if merged and root - merged[-1] <= 10 * config.ROOT_TOL + 1e-12 * v:
            continue
        merged.append(root)
    logger.debug(f"delta={delta:.6g}: roots {merged}")
    return merged


def _classify(prior: DiscretePrior, roots: List[float], delta: float,
              quad: QuadratureRule) -> List[StationaryKind]:
    v = prior.second_moment
    kinds = []
    for k, root in enumerate(roots):
        offset = _SIDE_OFFSET * v
        if k > 0:
            offset = min(offset, 0.25 * (root - roots[k - 1]))
        if k < len(roots) - 1:
            offset = min(offset, 0.25 * (roots[k + 1] - root))
        left = np.sign(fixed_point_residual(prior, root - offset, delta, quad)) if root - offset >= 0 else None
        right = np.sign(fixed_point_residual(prior, root + offset, delta, quad)) if root + offset <= v else None

        if left is None and right is None:
            kinds.append(StationaryKind.MINIMUM)
        elif left is None:
            kinds.append(StationaryKind.MINIMUM if right > 0 else
                         StationaryKind.MAXIMUM if right < 0 else StationaryKind.INFLEXION)
        elif right is None:
            kinds.append(StationaryKind.MINIMUM if left < 0 else
                         StationaryKind.MAXIMUM if left > 0 else StationaryKind.INFLEXION)
        elif left < 0 < right:
            kinds.append(StationaryKind.MINIMUM)
        elif left > 0 > right:
            kinds.append(StationaryKind.MAXIMUM)
        else:
            kinds.append(StationaryKind.INFLEXION)
    return kinds


def stationary_points(prior: DiscretePrior, delta: float,
                      quad: Optional[QuadratureRule] = None) -> StationaryPoints:
    """Roots of E = mmse((v - E) / delta) on [0, v], classified and labelled.

    Raises:
        TooManyStationaryPointsError: If more than three roots are found
        NoStationaryPointError: If the scan finds no root at all
    """
    delta = _validate_delta(delta)
    quad = default_quadrature(quad)
    if prior.second_moment == 0.0:
        point = StationaryPoint(energy=0.0, potential=0.0, kind=StationaryKind.MINIMUM)
        return StationaryPoints(delta=delta, points=(point,))

    roots = _locate_roots(prior, delta, quad)
    if len(roots) > 3:
        raise TooManyStationaryPointsError(delta, roots)
    if not roots:
        raise NoStationaryPointError(f"No stationary point found at delta={delta:.12g}")

    kinds = _classify(prior, roots, delta, quad)
    potentials = np.atleast_1d(i_rs(prior, np.array(roots), delta, quad))
    labels: List[Optional[BranchLabel]] = [None] * len(roots)
    if len(roots) == 3:
        labels = [BranchLabel.GOOD, BranchLabel.UNSTABLE, BranchLabel.BAD]
    points = tuple(
        StationaryPoint(energy=root, potential=float(value), kind=kind, branch=label)
        for root, value, kind, label in zip(roots, potentials, kinds, labels)
    )
    return StationaryPoints(delta=delta, points=points)


def mutual_information(prior: DiscretePrior, delta: float,
                       quad: Optional[QuadratureRule] = None) -> MutualInformation:
    """min over E of i_RS(E; delta), searched over stationary points and the endpoints.

    ``minimizers`` holds every candidate within rounding of the minimum, so a
    tie at the transition reports both branches.
    """
    points = stationary_points(prior, delta, quad)
    candidates = sorted(set(points.energies) | {0.0, prior.second_moment})
    values = np.atleast_1d(i_rs(prior, np.array(candidates), delta, quad))
    best = int(np.argmin(values))
    value = float(values[best])
    tie = 1e-12 * max(abs(value), 1.0)
    minimizers = tuple(float(c) for c, val in zip(candidates, values) if val - value <= tie)
    return MutualInformation(
        delta=points.delta,
        value=value,
        argmin=float(candidates[best]),
        minimizers=minimizers,
    )


def matrix_mmse(prior: DiscretePrior, delta: float,
                quad: Optional[QuadratureRule] = None) -> float:
    """v^2 - (v - E*)^2 with E* = argmin i_RS."""
    v = prior.second_moment
    e_star = mutual_information(prior, delta, quad).argmin
    return v**2 - (v - e_star) ** 2


def matrix_mmse_limits(prior: DiscretePrior, delta: float,
                       quad: Optional[QuadratureRule] = None) -> Tuple[float, float]:
    """Left and right limits of matrix_mmse at delta, read just below and just above it."""
    delta = _validate_delta(delta)
    return (
        matrix_mmse(prior, delta * (1.0 - _LIMIT_OFFSET), quad),
        matrix_mmse(prior, delta * (1.0 + _LIMIT_OFFSET), quad),
    )
