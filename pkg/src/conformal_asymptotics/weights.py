"""Weight functions for weighted conformal inference.

A weight function maps scores to nonnegative reals and additionally carries
a value at +infinity, ``w_inf``.  The default ``w_inf`` is the supremum of
the weight over the calibration support, which preserves the marginal
super-uniformity guarantee of weighted conformal p-values.  Weights that
are unbounded on the calibration support (e.g. the density ratio of a
Gaussian mean shift) are rejected at construction time instead of being
silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import (Exponential, Normal, ScoreDistribution, Uniform01,
                            distribution_from_json)
from .errors import ConfigurationError, DomainError

__all__ = ["WeightFunction", "ConstantWeight", "ExpTiltWeight", "TableWeight",
           "OracleRatioWeight", "StandardizedWeight", "oracle_weight",
           "weight_from_json", "weight_to_json"]


class WeightFunction:
    """Base class: callable on reals (and +inf), with a ``w_inf`` value."""

    kind: str
    w_inf: float

    def _eval_finite(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        """Evaluate the weight; x may contain +inf, mapped to ``w_inf``."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        at_inf = np.isposinf(x)
        out[at_inf] = self.w_inf
        finite = ~at_inf
        if np.any(finite):
            out[finite] = self._eval_finite(x[finite])
        if np.any(out < 0):
            raise DomainError("weight evaluated to a negative value")
        return float(out[0]) if scalar else out

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantWeight(WeightFunction):
    value: float = 1.0
    kind = "constant"

    def __post_init__(self):
        if not self.value > 0:
            raise ConfigurationError("constant weight must be positive")

    @property
    def w_inf(self) -> float:
        return self.value

    def _eval_finite(self, x):
        return np.full_like(x, self.value)

    def to_json(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class ExpTiltWeight(WeightFunction):
    """w(x) = exp(-lambda * max(x, 0)), an exponential tilt of the scores."""

    lam: float
    w_inf_value: float | None = None
    kind = "exp_tilt"

    def __post_init__(self):
        if self.lam < 0 and self.w_inf_value is None:
            raise ConfigurationError(
                "exp_tilt with negative lambda is unbounded on an unbounded "
                "support; supply an explicit w_inf")

    @property
    def w_inf(self) -> float:
        # sup over x >= 0 of exp(-lam x) is w(0) = 1 for lam >= 0
        return 1.0 if self.w_inf_value is None else self.w_inf_value

    def _eval_finite(self, x):
        return np.exp(-self.lam * np.maximum(x, 0.0))

    def to_json(self):
        return {"kind": self.kind, "lambda": self.lam, "w_inf": self.w_inf}


@dataclass(frozen=True)
class TableWeight(WeightFunction):
    """Right-continuous piecewise-constant weight.

    ``values`` has one more entry than ``breakpoints``: values[0] holds on
    (-inf, b_0) and values[i+1] on [b_i, b_{i+1}).
    """

    breakpoints: tuple
    values: tuple
    w_inf_value: float | None = None
    kind = "table"

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.size + 1 != vals.size:
            raise ConfigurationError("table weight needs len(values) == len(breakpoints) + 1")
        if np.any(np.diff(bp) <= 0):
            raise ConfigurationError("table breakpoints must be strictly increasing")
        if np.any(vals < 0):
            raise ConfigurationError("table weight values must be nonnegative")
        object.__setattr__(self, "breakpoints", tuple(bp.tolist()))
        object.__setattr__(self, "values", tuple(vals.tolist()))

    @property
    def w_inf(self) -> float:
        return max(self.values) if self.w_inf_value is None else self.w_inf_value

    def _eval_finite(self, x):
        idx = np.searchsorted(np.asarray(self.breakpoints), x, side="right")
        return np.asarray(self.values, dtype=float)[idx]

    def to_json(self):
        return {"kind": self.kind, "breakpoints": list(self.breakpoints),
                "values": list(self.values), "w_inf": self.w_inf}


@dataclass(frozen=True)
class OracleRatioWeight(WeightFunction):
    """Density ratio d(target)/d(cal), the oracle correction for a shift."""

    cal: ScoreDistribution
    target: ScoreDistribution
    w_inf_value: float | None = None
    kind = "oracle_ratio"

    def __post_init__(self):
        object.__setattr__(self, "_sup", _oracle_sup(self.cal, self.target))

    @property
    def w_inf(self) -> float:
        return self._sup if self.w_inf_value is None else self.w_inf_value

    def _eval_finite(self, x):
        num = self.target.pdf(x)
        den = self.cal.pdf(x)
        bad = (den == 0.0) & (num > 0.0)
        if np.any(bad):
            raise DomainError(
                "oracle ratio undefined: calibration density vanishes inside "
                "the target support (absolute continuity violated)")
        out = np.zeros_like(np.asarray(x, dtype=float))
        ok = den > 0.0
        out[ok] = num[ok] / den[ok]
        return out

    def to_json(self):
        return {"kind": self.kind, "cal": self.cal.to_json(),
                "target": self.target.to_json(), "w_inf": self.w_inf}


def _oracle_sup(cal: ScoreDistribution, target: ScoreDistribution) -> float:
    """Supremum of the density ratio over the calibration support.

    Only pairs with a provably bounded ratio are accepted; the rest raise,
    since an unbounded weight breaks the limit theory's boundedness
    assumption.  A user who wants a truncation can supply a TableWeight.
    """
    if cal == target:
        return 1.0
    if isinstance(cal, Exponential) and isinstance(target, Exponential):
        if target.rate < cal.rate:
            raise ConfigurationError(
                "density ratio Exponential(%g)->Exponential(%g) is unbounded"
                % (cal.rate, target.rate))
        return target.rate / cal.rate
    if isinstance(cal, Exponential) and isinstance(target, Uniform01):
        # ratio e^{rate x}/rate on (0,1)
        return float(np.exp(cal.rate) / cal.rate)
    if isinstance(cal, Normal) and isinstance(target, Normal):
        raise ConfigurationError(
            "Gaussian density ratios are unbounded unless the distributions "
            "coincide; supply a bounded TableWeight approximation instead")
    raise ConfigurationError(
        f"unsupported or non-absolutely-continuous pair "
        f"({cal.kind} calibration, {target.kind} target)")


def oracle_weight(cal: ScoreDistribution, target: ScoreDistribution) -> OracleRatioWeight:
    """The oracle weight function d(target)/d(cal)."""
    return OracleRatioWeight(cal=cal, target=target)


class StandardizedWeight(WeightFunction):
    """w composed with the calibration quantile map, for standardized scores.

    Produced by :func:`conformal_asymptotics.conformal.standardize`; operates
    on scores living in (0, 1).
    """

    kind = "standardized"

    def __init__(self, base: WeightFunction, cal_spec: ScoreDistribution):
        self.base = base
        self.cal_spec = cal_spec

    @property
    def w_inf(self) -> float:
        return self.base.w_inf

    def _eval_finite(self, x):
        u = np.clip(x, 1e-15, 1.0 - 1e-15)
        return np.atleast_1d(np.asarray(self.base(self.cal_spec.quantile(u)), dtype=float))

    def to_json(self):
        return {"kind": self.kind, "base": self.base.to_json(),
                "cal": self.cal_spec.to_json()}


def weight_to_json(w: WeightFunction) -> dict:
    return w.to_json()


def weight_from_json(obj: dict) -> WeightFunction:
    """Parse a weight function from its JSON form (see docs/schemas.md)."""
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise ConfigurationError("weight JSON must carry a 'kind' key")
    if kind == "constant":
        return ConstantWeight(value=float(obj.get("value", 1.0)))
    if kind == "exp_tilt":
        w_inf = obj.get("w_inf")
        return ExpTiltWeight(lam=float(obj["lambda"]),
                             w_inf_value=None if w_inf is None else float(w_inf))
    if kind == "table":
        w_inf = obj.get("w_inf")
        return TableWeight(breakpoints=tuple(obj["breakpoints"]),
                           values=tuple(obj["values"]),
                           w_inf_value=None if w_inf is None else float(w_inf))
    if kind == "oracle_ratio":
        w_inf = obj.get("w_inf")
        return OracleRatioWeight(cal=distribution_from_json(obj["cal"]),
                                 target=distribution_from_json(obj["target"]),
                                 w_inf_value=None if w_inf is None else float(w_inf))
    raise ConfigurationError(f"unknown weight kind: {kind!r}")
