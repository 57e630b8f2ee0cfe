import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conformal_asymptotics import (DomainError, LabeledPValues, SeededRng,
                                   StepFunction, bh_reject, ecdf, fdp_tdp,
                                   reference_In, sup_deviation)
from conformal_asymptotics.empirical import (step_function_from_csv,
                                             step_function_to_csv)

from .oracles import bh_oracle


def test_step_function_evaluation():
    f = StepFunction(np.array([0.25, 0.75]), np.array([0.5, 1.0]), 0.0)
    np.testing.assert_array_equal(f(np.array([0.0, 0.25, 0.5, 0.75, 1.0])),
                                  [0.0, 0.5, 0.5, 1.0, 1.0])
    np.testing.assert_array_equal(
        f.left_limit(np.array([0.25, 0.75, 1.0])), [0.0, 0.5, 1.0])


def test_step_function_validation():
    with pytest.raises(DomainError):
        StepFunction(np.array([0.5, 0.2]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        StepFunction(np.array([0.5]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        StepFunction(np.array([1.5]), np.array([1.0]))


def test_ecdf_examples():
    f = ecdf([0.5])
    assert f(0.4) == 0.0 and f(0.5) == 1.0
    g = ecdf([0.25, 0.25, 0.75])  # duplicates merge
    np.testing.assert_array_equal(g.jumps, [0.25, 0.75])
    np.testing.assert_allclose(g.values, [2 / 3, 1.0])


def test_ecdf_empty_warns():
    with pytest.warns(UserWarning):
        f = ecdf([])
    assert f(0.5) == 0.0


def test_ecdf_matches_fraction():
    rng = SeededRng(11).generator()
    p = rng.uniform(size=50)
    f = ecdf(p)
    for a in rng.uniform(size=100):
        assert f(a) == np.mean(p <= a)


def test_reference_In():
    f = reference_In(3)
    assert f(0.6) == 0.5  # floor(4 * 0.6)/4
    assert f(0.1) == 0.0
    assert f(1.0) == 1.0
    g = reference_In(0)
    assert g(0.5) == 0.0 and g(1.0) == 1.0


def test_sup_deviation_example():
    f = ecdf([0.25, 0.75])
    g = reference_In(3)
    # at t just below 0.25: f=0, I_3 -> 0; at 0.25: f=1/2, I_3(0.25)=1/4 ...
    assert sup_deviation(f, g) == 0.25


def test_sup_deviation_self_zero():
    f = ecdf([0.1, 0.5, 0.9])
    assert sup_deviation(f, f) == 0.0


@st.composite
def step_functions(draw):
    n = draw(st.integers(min_value=0, max_value=6))
    jumps = sorted(draw(st.lists(
        st.floats(min_value=0.01, max_value=0.99), min_size=n, max_size=n,
        unique=True)))
    values = draw(st.lists(st.floats(min_value=-2, max_value=2),
                           min_size=n, max_size=n))
    v0 = draw(st.floats(min_value=-2, max_value=2))
    return StepFunction(np.array(jumps), np.array(values), v0)


@settings(max_examples=100, deadline=None)
@given(step_functions(), step_functions())
def test_sup_deviation_symmetry(f, g):
    assert sup_deviation(f, g) == sup_deviation(g, f)


@settings(max_examples=100, deadline=None)
@given(step_functions(), step_functions(), step_functions())
def test_sup_deviation_triangle(f, g, h):
    assert sup_deviation(f, h) <= sup_deviation(f, g) + sup_deviation(g, h) + 1e-12


def test_bh_worked_example():
    out = bh_reject([0.01, 0.04, 0.03, 0.5], 0.1)
    assert out.k_hat == 3
    assert out.threshold == 0.04
    assert set(out.rejected.tolist()) == {0, 1, 2}


def test_bh_none_rejected():
    out = bh_reject([0.9, 0.8], 0.05)
    assert out.k_hat == 0 and out.threshold == 0.0 and out.rejected.size == 0


def test_bh_empty():
    out = bh_reject([], 0.1)
    assert out.k_hat == 0


def test_bh_invalid():
    with pytest.raises(DomainError):
        bh_reject([0.5], 0.0)
    with pytest.raises(DomainError):
        bh_reject([1.5], 0.1)


def test_bh_matches_oracle():
    rng = SeededRng(22).generator()
    for _ in range(500):
        m = int(rng.integers(1, 40))
        p = rng.uniform(size=m) ** rng.uniform(0.5, 2.0)
        alpha = float(rng.uniform(0.01, 0.5))
        out = bh_reject(p, alpha)
        assert set(out.rejected.tolist()) == bh_oracle(p, alpha)


def test_bh_monotone_in_alpha():
    rng = SeededRng(23).generator()
    p = rng.uniform(size=60) ** 2
    prev = set()
    for alpha in (0.01, 0.05, 0.1, 0.2, 0.4):
        cur = set(bh_reject(p, alpha).rejected.tolist())
        assert prev <= cur
        prev = cur


def test_fdp_tdp_examples():
    labels = LabeledPValues([0.01, 0.2, 0.03, 0.5],
                            is_null=[True, True, False, False])
    out = bh_reject(labels.values, 0.2)
    fdp, tdp = fdp_tdp(out, labels)
    # rejected = {0, 2}: one null of two rejections; one of two alternatives
    assert fdp == 0.5 and tdp == 0.5
    assert labels.pi0 == 0.5 and labels.m0 == 2


def test_fdp_tdp_empty_rejection():
    labels = LabeledPValues([0.9, 0.8], is_null=[True, False])
    fdp, tdp = fdp_tdp(bh_reject(labels.values, 0.05), labels)
    assert fdp == 0.0 and tdp == 0.0


def test_csv_roundtrip():
    f = ecdf([0.25, 0.5, 0.5, 0.9])
    g = step_function_from_csv(step_function_to_csv(f))
    np.testing.assert_array_equal(f.jumps, g.jumps)
    np.testing.assert_array_equal(f.values, g.values)
    assert f.value_before_first == g.value_before_first
    with pytest.raises(DomainError):
        step_function_from_csv("t,value\n0.5,1.0\n")
