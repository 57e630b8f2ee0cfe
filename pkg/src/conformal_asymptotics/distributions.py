"""Analytic score distributions with exact cdf/quantile/density evaluation.

Three continuous families are supported: Uniform(0,1), Exponential(rate)
and Normal(mean, sd).  All are increasing on their support, so quantile and
cdf are exact inverses there, and all sampling is inverse-transform from a
:class:`~conformal_asymptotics.rng.SeededRng` stream, which keeps sample
streams reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigurationError, DomainError
from .rng import SeededRng

__all__ = ["ScoreDistribution", "Uniform01", "Exponential", "Normal",
           "distribution_from_json", "distribution_to_json"]


class ScoreDistribution:
    """Base class for analytic score distributions."""

    kind: str

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, u):
        """Generalized inverse of the cdf, defined for u in (0, 1)."""
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        """Open interval (a, b) on which the cdf is increasing."""
        raise NotImplementedError

    def sample(self, rng: SeededRng, count: int) -> np.ndarray:
        """Inverse-transform sampling; deterministic given the rng stream."""
        if count < 0:
            raise DomainError("count must be nonnegative")
        if count == 0:
            return np.empty(0)
        return np.asarray(self.quantile(rng.uniforms(count)), dtype=float)

    def _check_u(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0.0) or np.any(u >= 1.0):
            raise DomainError("quantile argument must lie in (0, 1)")
        return u

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform01(ScoreDistribution):
    kind = "uniform01"

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def quantile(self, u):
        return self._check_u(u)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0)

    def support(self):
        return (0.0, 1.0)

    def to_json(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Exponential(ScoreDistribution):
    rate: float
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigurationError("Exponential rate must be positive")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))

    def quantile(self, u):
        u = self._check_u(u)
        return -np.log1p(-u) / self.rate

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.0, 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)))

    def support(self):
        return (0.0, math.inf)

    def to_json(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Normal(ScoreDistribution):
    mean: float = 0.0
    sd: float = 1.0
    kind = "normal"

    def __post_init__(self):
        if not self.sd > 0:
            raise ConfigurationError("Normal sd must be positive")

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def quantile(self, u):
        return self.mean + self.sd * ndtri(self._check_u(u))

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))

    def support(self):
        return (-math.inf, math.inf)

    def to_json(self):
        return {"kind": self.kind, "mean": self.mean, "sd": self.sd}


def distribution_to_json(spec: ScoreDistribution) -> dict:
    return spec.to_json()


def distribution_from_json(obj: dict) -> ScoreDistribution:
    """Parse a distribution from its JSON object form (see docs/schemas.md)."""
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise ConfigurationError("distribution JSON must carry a 'kind' key")
    if kind == "uniform01":
        return Uniform01()
    if kind == "exponential":
        return Exponential(rate=float(obj["rate"]))
    if kind == "normal":
        return Normal(mean=float(obj.get("mean", 0.0)), sd=float(obj.get("sd", 1.0)))
    raise ConfigurationError(f"unknown distribution kind: {kind!r}")
