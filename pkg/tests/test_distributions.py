import numpy as np
import pytest

from conformal_asymptotics import (DomainError, Exponential, Normal, SeededRng,
                                   Uniform01, distribution_from_json,
                                   distribution_to_json)
from conformal_asymptotics.errors import ConfigurationError

ALL = [Uniform01(), Exponential(1.0), Exponential(3.0), Normal(0.0, 1.0),
       Normal(-2.0, 0.5)]


@pytest.mark.parametrize("dist", ALL)
def test_quantile_cdf_roundtrip(dist):
    u = np.linspace(0.001, 0.999, 57)
    np.testing.assert_allclose(dist.cdf(dist.quantile(u)), u, atol=1e-12)


@pytest.mark.parametrize("dist", ALL)
def test_pdf_is_cdf_derivative(dist):
    x = dist.quantile(np.linspace(0.05, 0.95, 19))
    h = 1e-6
    numeric = (dist.cdf(x + h) - dist.cdf(x - h)) / (2 * h)
    np.testing.assert_allclose(dist.pdf(x), numeric, rtol=1e-5)


@pytest.mark.parametrize("dist", ALL)
def test_sampling_matches_cdf(dist):
    sample = dist.sample(SeededRng(42, 0), 20000)
    grid = dist.quantile(np.array([0.1, 0.25, 0.5, 0.75, 0.9]))
    for q, p in zip(grid, [0.1, 0.25, 0.5, 0.75, 0.9]):
        assert abs(np.mean(sample <= q) - p) < 0.015


def test_sampling_deterministic():
    a = Exponential(2.0).sample(SeededRng(7, 3), 100)
    b = Exponential(2.0).sample(SeededRng(7, 3), 100)
    c = Exponential(2.0).sample(SeededRng(7, 4), 100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_quantile_domain_errors():
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(DomainError):
            Exponential(1.0).quantile(bad)


def test_invalid_parameters():
    with pytest.raises(ConfigurationError):
        Exponential(0.0)
    with pytest.raises(ConfigurationError):
        Normal(0.0, -1.0)


@pytest.mark.parametrize("dist", ALL)
def test_json_roundtrip(dist):
    assert distribution_from_json(distribution_to_json(dist)) == dist


def test_json_unknown_kind():
    with pytest.raises(ConfigurationError):
        distribution_from_json({"kind": "cauchy"})


def test_exponential_known_values():
    d = Exponential(2.0)
    assert d.cdf(0.0) == 0.0
    np.testing.assert_allclose(d.cdf(1.0), 1 - np.exp(-2.0))
    np.testing.assert_allclose(d.quantile(0.5), np.log(2.0) / 2.0)
