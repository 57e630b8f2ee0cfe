"""Finite-sample conformal machinery.

Conformal and weighted conformal p-values, weighted quantiles, prediction
thresholds, and the duality that ties them together: a test score's p-value
is below alpha exactly when the score exceeds the level-(1-alpha) weighted
quantile of the calibration measure (with a point mass at +infinity).
"""

from __future__ import annotations

import numpy as np

from .distributions import ScoreDistribution
from .errors import DegenerateWeightsError, DomainError, TieError
from .weights import ConstantWeight, StandardizedWeight, WeightFunction

__all__ = ["conformal_pvalues", "weighted_conformal_pvalues",
           "weighted_quantile", "prediction_threshold", "standardize"]


def _as_scores(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} scores must be finite")
    return arr


def _check_ties(cal_sorted: np.ndarray, test: np.ndarray) -> None:
    left = np.searchsorted(cal_sorted, test, side="left")
    right = np.searchsorted(cal_sorted, test, side="right")
    if np.any(left != right):
        raise TieError("exact tie between calibration and test scores; "
                       "score distributions must be continuous")


def conformal_pvalues(cal, test) -> np.ndarray:
    """Conformal p-values (1 + #{S_k >= T_i}) / (n + 1).

    Values live on the grid {1/(n+1), ..., 1}; an empty calibration sample
    yields all-ones.  Exact calibration/test ties raise :class:`TieError`.
    """
    cal = _as_scores(cal, "calibration")
    test = _as_scores(test, "test")
    n = cal.size
    cal_sorted = np.sort(cal)
    _check_ties(cal_sorted, test)
    n_geq = n - np.searchsorted(cal_sorted, test, side="left")
    return (1.0 + n_geq) / (n + 1.0)


def weighted_conformal_pvalues(cal, test, weight: WeightFunction) -> np.ndarray:
    """Weighted conformal p-values.

    p_i = (w(inf) + sum_k w(S_k) 1{S_k >= T_i}) / (w(inf) + sum_k w(S_k)).
    """
    cal = _as_scores(cal, "calibration")
    test = _as_scores(test, "test")
    order = np.argsort(cal)
    cal_sorted = cal[order]
    _check_ties(cal_sorted, test)
    w_cal = np.asarray(weight(cal_sorted), dtype=float).ravel()
    if not np.all(np.isfinite(w_cal)):
        raise DomainError("weight is not finite on all calibration scores")
    w_inf = float(weight.w_inf)
    # suffix[j] = sum of weights of calibration scores with sorted index >= j;
    # the total reuses suffix[0] so that p <= 1 holds exactly in floats
    suffix = np.concatenate([np.cumsum(w_cal[::-1])[::-1], [0.0]])
    total = w_inf + (suffix[0] if w_cal.size else 0.0)
    if not total > 0:
        raise DegenerateWeightsError("all weights (including w_inf) vanish")
    idx = np.searchsorted(cal_sorted, test, side="left")
    return (w_inf + suffix[idx]) / total


def weighted_quantile(points, masses, level: float) -> float:
    """Smallest point with cumulative mass >= level.

    ``points`` may contain +inf; ``masses`` must be nonnegative and sum to 1.
    """
    points = np.asarray(points, dtype=float).ravel()
    masses = np.asarray(masses, dtype=float).ravel()
    if points.size == 0:
        raise DomainError("weighted_quantile of an empty point set")
    if points.size != masses.size:
        raise DomainError("points and masses must have equal length")
    if np.any(masses < 0):
        raise DomainError("masses must be nonnegative")
    if abs(masses.sum() - 1.0) > 1e-9:
        raise DomainError("masses must sum to 1")
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    order = np.argsort(points)
    cum = np.cumsum(masses[order])
    pos = int(np.searchsorted(cum, level - 1e-12, side="left"))
    pos = min(pos, points.size - 1)
    return float(points[order][pos])


def prediction_threshold(cal, alpha: float, weight: WeightFunction | None = None) -> float:
    """Level-(1-alpha) threshold of the weighted calibration measure.

    Returns +inf when the mass at infinity is reached first.  Satisfies the
    duality: p-value(t) <= alpha iff t > threshold, for every candidate t.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    cal = _as_scores(cal, "calibration")
    if weight is None:
        weight = ConstantWeight(1.0)
    w_cal = np.atleast_1d(np.asarray(weight(cal), dtype=float))
    w_inf = float(weight.w_inf)
    total = w_inf + w_cal.sum()
    if not total > 0:
        raise DegenerateWeightsError("all weights (including w_inf) vanish")
    points = np.concatenate([cal, [np.inf]])
    masses = np.concatenate([w_cal, [w_inf]]) / total
    return weighted_quantile(points, masses, 1.0 - alpha)


def standardize(cal, test, weight: WeightFunction, cal_spec: ScoreDistribution):
    """Map scores through the calibration cdf and the weight accordingly.

    Returns (cal', test', weight') with cal' = F_cal(S) uniform in law,
    test' = F_cal(T) and weight' = w o F_cal^{-1}; the weighted p-values of
    the transformed triple equal the originals exactly, because the cdf is
    increasing on the support and ranks and weight values are preserved.
    """
    cal = _as_scores(cal, "calibration")
    test = _as_scores(test, "test")
    cal_t = np.asarray(cal_spec.cdf(cal), dtype=float)
    test_t = np.asarray(cal_spec.cdf(test), dtype=float)
    return cal_t, test_t, StandardizedWeight(weight, cal_spec)
