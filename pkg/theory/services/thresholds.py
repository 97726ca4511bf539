"""Algorithmic and information-theoretic thresholds from the stationary curve.

Every stationary point of i_RS(.; delta) is E = mmse(s) for some snr s with
delta = (v - mmse(s)) / s. Walking s from 0 to infinity traces all branches at
once: the bad branch while delta decreases, the unstable one while it increases
and the good one once it decreases again. The local minimum of delta(s) is
Delta_AMP and the local maximum is the spinodal where the good branch dies.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from shared.config.config import config
from shared.domain.consts import MmseValidity, Numerics, TransitionOrder
from shared.domain.errors import TooManyStationaryPointsError
from shared.domain.models import (
    DiscretePrior,
    QuadratureRule,
    StationaryCurve,
    VectorMmse,
    frozen_array,
)
from shared.domain.payloads import Thresholds
from theory.services.potential import i_rs, mutual_information, stationary_points
from theory.services.prior import bias_zero_mean, default_quadrature, mmse, overlap

logger = logging.getLogger(__name__)

# bias extrapolations that move by more than this (relative) are reported
_EXTRAPOLATION_WARN = 1e-3
# distance from E = v used by the local first-order test, in units of v
_LOCAL_TEST_OFFSET = 1e-4
# S-shapes shallower than this (relative) are rounding noise
_MIN_RELATIVE_DEPTH = 1e-12


class _CurveAnalysis(NamedTuple):
    delta_amp: float
    delta_spinodal: float
    delta_rs: float
    log_snr_min: float  # bad branch lives at log s below this
    log_snr_max: float  # good branch lives at log s above this
    coexistence: bool


def stationary_curve(prior: DiscretePrior, quad: Optional[QuadratureRule] = None,
                     points: Optional[int] = None) -> StationaryCurve:
    """Sample (snr, E, delta) along the stationary curve on a geometric snr grid."""
    quad = default_quadrature(quad)
    points = points if points is not None else config.CURVE_SNR_POINTS
    v = prior.second_moment
    if v == 0.0:
        raise ValueError("Stationary curve is undefined for a prior with v = 0")
    span = 10.0 ** Numerics.LOG_SNR_SPAN
    low = 1.0 / (span * v)
    if prior.mean != 0.0:
        # delta(s) ~ m^2 / s near 0; start where it exceeds every bracket we search
        low = min(low, 1e-3 * prior.mean**2 / v**2)
    snr = np.geomspace(low, span / v, points)
    energies = np.asarray(mmse(prior, snr, quad))
    deltas = np.asarray(overlap(prior, snr, quad)) / snr
    return StationaryCurve(
        snr=frozen_array(snr),
        energies=frozen_array(energies),
        deltas=frozen_array(deltas),
    )


def _delta_of_log_snr(prior: DiscretePrior, quad: QuadratureRule) -> Callable[[float], float]:
    def delta_at(t: float) -> float:
        s = math.exp(t)
        return float(overlap(prior, s, quad)) / s
    return delta_at


def _turning_points(deltas: np.ndarray) -> Tuple[list, list]:
    """Grid indices of local minima and maxima of a sampled curve."""
    direction = np.sign(np.diff(deltas))
    moving = np.nonzero(direction)[0]
    minima, maxima = [], []
    for before, after in zip(moving[:-1], moving[1:]):
        if direction[before] < 0 < direction[after]:
            minima.append(int(after))
        elif direction[before] > 0 > direction[after]:
            maxima.append(int(after))
    return minima, maxima


def _refine_extremum(delta_at, log_snr: np.ndarray, index: int, sign: float) -> Tuple[float, float]:
    low = log_snr[max(index - 1, 0)]
    high = log_snr[min(index + 1, log_snr.size - 1)]
    result = minimize_scalar(
        lambda t: sign * delta_at(t), bounds=(low, high), method="bounded",
        options={"xatol": 1e-12},
    )
    return float(result.x), float(sign * result.fun)


def _branch_snr(delta_at, delta: float, low: float, high: float) -> float:
    """Solve delta(s) = delta for log s on a monotone piece [low, high]."""
    f_low, f_high = delta_at(low) - delta, delta_at(high) - delta
    if f_low == 0.0:
        return low
    if f_high == 0.0:
        return high
    if f_low * f_high > 0:
        raise RuntimeError(f"Branch at delta={delta:.12g} not bracketed on log snr [{low}, {high}]")
    return brentq(lambda t: delta_at(t) - delta, low, high, xtol=1e-14, rtol=1e-14)


def _potential_gap(prior, quad, delta_at, analysis_bounds, delta: float) -> float:
    """i_RS(E_good) - i_RS(E_bad) at delta inside the coexistence region."""
    t_first, t_min, t_max, t_last = analysis_bounds
    t_bad = _branch_snr(delta_at, delta, t_first, t_min)
    t_good = _branch_snr(delta_at, delta, t_max, t_last)
    e_bad = float(mmse(prior, math.exp(t_bad), quad))
    e_good = float(mmse(prior, math.exp(t_good), quad))
    return i_rs(prior, e_good, delta, quad) - i_rs(prior, e_bad, delta, quad)


def _analyse(prior: DiscretePrior, quad: QuadratureRule) -> _CurveAnalysis:
    curve = stationary_curve(prior, quad)
    log_snr = np.log(curve.snr)
    minima, maxima = _turning_points(curve.deltas)
    if len(minima) > 1 or len(maxima) > 1:
        raise TooManyStationaryPointsError(
            float(curve.deltas[minima[0]] if minima else curve.deltas[maxima[0]]),
            [float(curve.energies[i]) for i in sorted(minima + maxima)],
        )
    no_shape = _CurveAnalysis(math.inf, math.inf, math.inf, math.nan, math.nan, False)
    if not minima and not maxima:
        return no_shape
    if len(minima) != 1 or len(maxima) != 1 or minima[0] >= maxima[0]:
        raise ValueError(
            f"Stationary curve has an unexpected shape (minima at {minima}, maxima at {maxima})"
        )

    delta_at = _delta_of_log_snr(prior, quad)
    t_min, delta_amp = _refine_extremum(delta_at, log_snr, minima[0], 1.0)
    t_max, delta_spinodal = _refine_extremum(delta_at, log_snr, maxima[0], -1.0)
    if delta_spinodal - delta_amp <= _MIN_RELATIVE_DEPTH * delta_amp:
        return no_shape

    bounds = (float(log_snr[0]), t_min, t_max, float(log_snr[-1]))

    def gap(delta):
        return _potential_gap(prior, quad, delta_at, bounds, delta)

    gap_low, gap_high = gap(delta_amp), gap(delta_spinodal)
    if gap_low >= 0:
        logger.warning(f"Good branch not globally optimal at delta_amp={delta_amp:.8g}")
        delta_rs = delta_amp
    elif gap_high <= 0:
        logger.warning(f"Good branch still optimal at the spinodal {delta_spinodal:.8g}")
        delta_rs = delta_spinodal
    else:
        delta_rs = bisect(gap, delta_amp, delta_spinodal, rtol=config.THRESHOLD_REL_TOL)
    logger.debug(
        f"coexistence [{delta_amp:.10g}, {delta_spinodal:.10g}], delta_rs={delta_rs:.10g}"
    )
    return _CurveAnalysis(delta_amp, delta_spinodal, float(delta_rs), t_min, t_max, True)


def _extrapolate(first: float, second: float, eps_first: float, eps_second: float) -> float:
    """Linear extrapolation to zero bias from values at two bias levels."""
    return second - (first - second) * eps_second / (eps_first - eps_second)


def _zero_mean_thresholds(prior: DiscretePrior, quad: QuadratureRule) -> Thresholds:
    v2 = prior.second_moment**2
    eps_first, eps_second = config.ZERO_MEAN_BIAS, config.ZERO_MEAN_BIAS_SECONDARY
    first = _analyse(bias_zero_mean(prior, eps_first), quad)
    second = _analyse(bias_zero_mean(prior, eps_second), quad)

    if not (first.coexistence and second.coexistence):
        if first.coexistence != second.coexistence:
            logger.warning("Biased priors disagree on coexistence; reporting a continuous transition")
        return Thresholds(
            delta_amp=v2, delta_rs=v2, delta_opt=v2, delta_spectral=v2, delta_spinodal=v2,
            transition_order=TransitionOrder.CONTINUOUS, bias_extrapolated=True,
        )

    notes = []
    values = {}
    for name in ("delta_amp", "delta_rs", "delta_spinodal"):
        a, b = getattr(first, name), getattr(second, name)
        values[name] = _extrapolate(a, b, eps_first, eps_second)
        if abs(a - b) > _EXTRAPOLATION_WARN * abs(b):
            logger.warning(f"Unstable bias extrapolation for {name}: {a:.10g} vs {b:.10g}")
            notes.append(f"{name} bias extrapolation unstable")

    delta_amp = min(values["delta_amp"], v2)
    delta_rs = max(values["delta_rs"], delta_amp)
    delta_spinodal = max(values["delta_spinodal"], delta_rs)
    order = (
        TransitionOrder.FIRST
        if delta_rs > delta_amp * (1.0 + config.THRESHOLD_REL_TOL)
        else TransitionOrder.CONTINUOUS
    )
    return Thresholds(
        delta_amp=delta_amp, delta_rs=delta_rs, delta_opt=delta_rs, delta_spectral=v2,
        delta_spinodal=delta_spinodal, transition_order=order, bias_extrapolated=True,
        note="; ".join(notes) or None,
    )


def compute_thresholds(prior: DiscretePrior, quad: Optional[QuadratureRule] = None) -> Thresholds:
    """Delta_AMP, Delta_RS (= Delta_Opt), the spinodal and Delta_spectral = v^2.

    Zero-mean priors are evaluated on two slightly biased copies and the bias
    is extrapolated away. Without a coexistence region a non-zero-mean prior
    has no transition (all thresholds infinite) and a zero-mean prior has a
    continuous one at v^2.
    """
    quad = default_quadrature(quad)
    v = prior.second_moment
    if v == 0.0:
        raise ValueError("Thresholds are undefined for a prior with v = 0")
    if prior.is_zero_mean:
        result = _zero_mean_thresholds(prior, quad)
    else:
        analysis = _analyse(prior, quad)
        result = Thresholds(
            delta_amp=analysis.delta_amp,
            delta_rs=analysis.delta_rs,
            delta_opt=analysis.delta_rs,
            delta_spectral=v**2,
            delta_spinodal=analysis.delta_spinodal,
            transition_order=TransitionOrder.FIRST if analysis.coexistence else TransitionOrder.NONE,
            note=None if analysis.coexistence else "no transition detected",
        )
    logger.info(
        f"Thresholds: delta_amp={result.delta_amp:.10g} delta_rs={result.delta_rs:.10g} "
        f"order={result.transition_order.value}"
    )
    return result


def _default_interval(prior: DiscretePrior) -> Tuple[float, float]:
    v2 = prior.second_moment**2
    return config.DELTA_BRACKET_LOW * v2, config.DELTA_BRACKET_HIGH * v2


def find_delta_amp(prior: DiscretePrior, search_interval: Optional[Tuple[float, float]] = None,
                   quad: Optional[QuadratureRule] = None) -> float:
    """Supremum of delta with a unique fixed point; inf when none lies in the interval.

    A prior with v = 0 (a point mass at zero) has no transition and gives inf.
    """
    if prior.second_moment == 0.0:
        return math.inf
    low, high = search_interval or _default_interval(prior)
    if not 0 < low < high:
        raise ValueError(f"Invalid search interval ({low}, {high})")
    delta_amp = compute_thresholds(prior, quad).delta_amp
    if not low <= delta_amp <= high:
        logger.info(f"No transition detected in [{low:.6g}, {high:.6g}]")
        return math.inf
    return delta_amp


def find_delta_rs(prior: DiscretePrior, quad: Optional[QuadratureRule] = None) -> float:
    if prior.second_moment == 0.0:
        return math.inf
    return compute_thresholds(prior, quad).delta_rs


def transition_order(prior: DiscretePrior, quad: Optional[QuadratureRule] = None) -> TransitionOrder:
    """First-order, continuous or absent transition.

    Zero-mean priors use a local test at delta = v^2: the transition is first
    order when g(v - dE) > 0 there, which for small dE holds iff
    (E S^3)^2 > 2 v^3.
    """
    quad = default_quadrature(quad)
    if prior.is_zero_mean:
        v = prior.second_moment
        offset = _LOCAL_TEST_OFFSET * v
        energy = v - offset
        residual = energy - float(mmse(prior, offset / v**2, quad))
        return TransitionOrder.FIRST if residual > 0 else TransitionOrder.CONTINUOUS
    return TransitionOrder.FIRST if _analyse(prior, quad).coexistence else TransitionOrder.NONE


def find_first_order_boundary(build_prior: Callable[[float], DiscretePrior], low: float,
                              high: float, tol: float = 1e-5,
                              quad: Optional[QuadratureRule] = None) -> float:
    """Bisect the density where ``transition_order`` switches to or from first order.

    Raises:
        ValueError: If the order is the same at both ends of [low, high]
    """
    def is_first(rho: float) -> bool:
        return transition_order(build_prior(rho), quad) == TransitionOrder.FIRST

    first_low, first_high = is_first(low), is_first(high)
    if first_low == first_high:
        raise ValueError(f"Transition order does not change on [{low}, {high}]")
    while high - low > tol:
        mid = 0.5 * (low + high)
        if is_first(mid) == first_low:
            low = mid
        else:
            high = mid
        logger.debug(f"first-order boundary bracket [{low:.8g}, {high:.8g}]")
    return 0.5 * (low + high)


def good_branch(prior: DiscretePrior, delta: float, thresholds: Thresholds,
                quad: Optional[QuadratureRule] = None) -> Optional[float]:
    """E_good(delta): the smallest local minimum, or None past the spinodal."""
    if delta > thresholds.delta_spinodal:
        return None
    minima = stationary_points(prior, delta, quad).minima
    return minima[0].energy if minima else None


def vector_mmse(prior: DiscretePrior, delta: float, thresholds: Optional[Thresholds] = None,
                quad: Optional[QuadratureRule] = None) -> VectorMmse:
    """argmin i_RS, proven outside [delta_amp, delta_rs] and conjectured inside."""
    thresholds = thresholds or compute_thresholds(prior, quad)
    value = mutual_information(prior, delta, quad).argmin
    inside = (
        thresholds.delta_amp < thresholds.delta_rs
        and thresholds.delta_amp <= delta <= thresholds.delta_rs
    )
    validity = MmseValidity.CONJECTURED if inside else MmseValidity.PROVEN
    return VectorMmse(delta=delta, value=value, validity=validity)
