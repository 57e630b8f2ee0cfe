"""Scikit-learn style estimators over the conformal machinery.

These wrappers let the p-value computations compose with sklearn pipelines
and model-selection tooling: they follow the fit/predict contract, expose
``get_params``/``set_params``, and validate inputs with sklearn helpers.
The heavy lifting stays in :mod:`conformal_asymptotics.conformal` and
:mod:`conformal_asymptotics.empirical`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .conformal import (conformal_pvalues, prediction_threshold,
                        weighted_conformal_pvalues)
from .empirical import bh_reject
from .errors import DomainError
from .weights import WeightFunction

__all__ = ["ConformalPValues", "BHNoveltyDetector"]


def _scores_1d(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False, dtype=float)
    return column_or_1d(X, warn=False)


class ConformalPValues(BaseEstimator):
    """Transductive conformal p-values against a calibration sample.

    Parameters
    ----------
    weight : WeightFunction or None
        Optional weight function for distribution shift; None means the
        plain (unweighted) conformal p-values.
    """

    def __init__(self, weight: WeightFunction | None = None):
        self.weight = weight

    def fit(self, X, y=None):
        """Store the calibration scores X (array-like of shape (n,) or (n, 1))."""
        scores = _scores_1d(X)
        if self.weight is not None and not isinstance(self.weight, WeightFunction):
            raise DomainError("weight must be a WeightFunction or None")
        self.calibration_scores_ = scores
        self.n_calibration_ = scores.size
        return self

    def predict(self, X) -> np.ndarray:
        """P-values of the test scores X, in input order."""
        check_is_fitted(self, "calibration_scores_")
        test = _scores_1d(X)
        if self.weight is None:
            return conformal_pvalues(self.calibration_scores_, test)
        return weighted_conformal_pvalues(self.calibration_scores_, test, self.weight)

    # transductive p-values are a transformation of the test sample
    transform = predict

    def predict_threshold(self, alpha: float) -> float:
        """Score threshold of the level-(1-alpha) prediction set (may be +inf)."""
        check_is_fitted(self, "calibration_scores_")
        return prediction_threshold(self.calibration_scores_, alpha, self.weight)


class BHNoveltyDetector(BaseEstimator):
    """Novelty detection: BH at level alpha on (weighted) conformal p-values.

    ``predict`` returns a boolean mask of declared novelties; the rejection
    threshold and count are exposed as ``threshold_`` and ``k_hat_`` after
    the call.
    """

    def __init__(self, alpha: float = 0.1, weight: WeightFunction | None = None):
        self.alpha = alpha
        self.weight = weight

    def fit(self, X, y=None):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        self.pvaluer_ = ConformalPValues(weight=self.weight).fit(X)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "pvaluer_")
        pvalues = self.pvaluer_.predict(X)
        outcome = bh_reject(pvalues, self.alpha)
        self.threshold_ = outcome.threshold
        self.k_hat_ = outcome.k_hat
        mask = np.zeros(pvalues.size, dtype=bool)
        mask[outcome.rejected] = True
        return mask
