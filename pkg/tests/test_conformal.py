import numpy as np
import pytest

from conformal_asymptotics import (ConstantWeight, DomainError, Exponential,
                                   ExpTiltWeight, SeededRng, TieError,
                                   conformal_pvalues, oracle_weight,
                                   prediction_threshold, standardize,
                                   weighted_conformal_pvalues,
                                   weighted_quantile)
from conformal_asymptotics.errors import DegenerateWeightsError

from .oracles import conformal_pvalues_oracle, weighted_conformal_pvalues_oracle


def test_pvalues_worked_example():
    p = conformal_pvalues([0.1, 0.4, 0.7], [0.5])
    np.testing.assert_array_equal(p, [0.5])


def test_pvalues_empty_calibration():
    np.testing.assert_array_equal(conformal_pvalues([], [0.3, 0.9]), [1.0, 1.0])


def test_pvalues_match_oracle():
    rng = SeededRng(101).generator()
    for _ in range(20):
        cal = rng.normal(size=rng.integers(1, 40))
        test = rng.normal(size=rng.integers(1, 40))
        np.testing.assert_allclose(conformal_pvalues(cal, test),
                                   conformal_pvalues_oracle(cal, test),
                                   atol=1e-15)


@pytest.mark.parametrize("weight", [
    ConstantWeight(1.0),
    ConstantWeight(2.7),
    ExpTiltWeight(1.5),
    oracle_weight(Exponential(1.0), Exponential(3.0)),
])
def test_weighted_pvalues_match_oracle(weight):
    rng = SeededRng(202).generator()
    for _ in range(10):
        cal = rng.exponential(size=rng.integers(1, 40))
        test = rng.exponential(size=rng.integers(1, 40))
        got = weighted_conformal_pvalues(cal, test, weight)
        want = weighted_conformal_pvalues_oracle(cal, test, weight)
        np.testing.assert_allclose(got, want, atol=1e-12)
        assert np.all(got <= 1.0) and np.all(got > 0.0)


def test_weighted_reduces_to_unweighted():
    rng = SeededRng(7).generator()
    cal, test = rng.normal(size=50), rng.normal(size=20)
    np.testing.assert_allclose(
        weighted_conformal_pvalues(cal, test, ConstantWeight(1.0)),
        conformal_pvalues(cal, test), atol=1e-15)


def test_weight_scaling_invariance():
    """Multiplying the weight function by a constant leaves p-values unchanged."""
    from conformal_asymptotics.weights import WeightFunction

    class ScaledWeight(WeightFunction):
        def __init__(self, inner, c):
            self._inner, self._c = inner, c

        def _eval_finite(self, x):
            return self._c * np.asarray(self._inner(x))

        @property
        def w_inf(self):
            return self._c * self._inner.w_inf

    rng = SeededRng(8).generator()
    cal, test = rng.exponential(size=60), rng.exponential(size=25)
    base = ExpTiltWeight(2.0)
    for c in (0.25, 5.0):
        np.testing.assert_allclose(
            weighted_conformal_pvalues(cal, test, ScaledWeight(base, c)),
            weighted_conformal_pvalues(cal, test, base), atol=1e-13)


def test_tie_error():
    with pytest.raises(TieError):
        conformal_pvalues([0.1, 0.5, 0.9], [0.5])
    with pytest.raises(TieError):
        weighted_conformal_pvalues([0.5], [0.5], ConstantWeight(1.0))


def test_nonfinite_scores_rejected():
    with pytest.raises(DomainError):
        conformal_pvalues([0.1, np.nan], [0.5])
    with pytest.raises(DomainError):
        conformal_pvalues([0.1], [np.inf])


def test_weighted_quantile_examples():
    assert weighted_quantile([1.0, 2.0, 3.0], [1 / 3] * 3, 0.5) == 2.0
    assert weighted_quantile([1.0, np.inf], [0.4, 0.6], 0.5) == np.inf
    with pytest.raises(DomainError):
        weighted_quantile([1.0], [0.5], 0.5)
    with pytest.raises(DomainError):
        weighted_quantile([], [], 0.5)


def test_prediction_threshold_examples():
    assert prediction_threshold([1.0, 2.0, 3.0], 0.5) == 2.0
    assert prediction_threshold([1.0, 2.0, 3.0], 0.1) == np.inf


def test_prediction_threshold_degenerate_weights():
    from conformal_asymptotics.weights import WeightFunction

    class ZeroWeight(WeightFunction):
        def _eval_finite(self, x):
            return np.zeros_like(np.asarray(x, dtype=float))

        @property
        def w_inf(self):
            return 0.0

    with pytest.raises(DegenerateWeightsError):
        prediction_threshold([1.0, 2.0], 0.5, ZeroWeight())


def test_duality_random_triples():
    """p-value(t) <= alpha iff t > prediction threshold, exactly."""
    rng = SeededRng(303).generator()
    weight = ExpTiltWeight(1.0)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        cal = rng.exponential(size=n)
        t = float(rng.exponential())
        alpha = float(rng.uniform(0.01, 0.99))
        thr = prediction_threshold(cal, alpha, weight)
        p = weighted_conformal_pvalues(cal, [t], weight)[0]
        assert (p <= alpha) == (t > thr)


def test_duality_unweighted():
    rng = SeededRng(304).generator()
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        cal = rng.normal(size=n)
        t = float(rng.normal())
        alpha = float(rng.uniform(0.01, 0.99))
        thr = prediction_threshold(cal, alpha)
        p = conformal_pvalues(cal, [t])[0]
        assert (p <= alpha) == (t > thr)


def test_standardization_invariance():
    rng = SeededRng(404)
    spec = Exponential(1.0)
    cal = spec.sample(rng, 80)
    test = Exponential(3.0).sample(SeededRng(404, 1), 40)
    weight = ExpTiltWeight(2.0)
    before = weighted_conformal_pvalues(cal, test, weight)
    cal_t, test_t, weight_t = standardize(cal, test, weight, spec)
    after = weighted_conformal_pvalues(cal_t, test_t, weight_t)
    np.testing.assert_allclose(after, before, atol=1e-12)
    assert np.all(cal_t >= 0) and np.all(cal_t <= 1)


def test_exchangeability_superuniformity():
    """Under exchangeability, P(p <= alpha) = floor((n+1)alpha)/(n+1)."""
    n, reps = 99, 4000
    rng = SeededRng(505).generator()
    alphas = np.array([0.05, 0.1, 0.25, 0.5])
    hits = np.zeros_like(alphas)
    for _ in range(reps):
        scores = rng.normal(size=n + 1)
        p = conformal_pvalues(scores[:n], scores[n:])[0]
        hits += p <= alphas
    expected = np.floor((n + 1) * alphas) / (n + 1)
    se = np.sqrt(expected * (1 - expected) / reps)
    assert np.all(np.abs(hits / reps - expected) < 3 * se + 1e-12)
