"""Asymptotic theory for conformal p-value processes.

Computable versions of the large-sample results: the effective sample size
tau = nm/(n+m), the Kolmogorov distribution calibrating uniform bands for
the false coverage proportion (FCP) process, the limit curves under
distribution shift and weighting (G, G^w, I^w, rho^w, the null/mixture
curves), pointwise FCP confidence intervals, the asymptotic BH threshold,
and the limiting means/variances of the false and true discovery
proportions of the step-up procedure.

All limit curves are exposed in standardized coordinates: scores are mapped
through the calibration cdf, so every curve is a function on (0, 1).
Evaluations clamp their argument to [1e-9, 1 - 1e-9].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq
from scipy.special import ndtri

from .distributions import (Exponential, ScoreDistribution,
                            distribution_from_json, distribution_to_json)
from .errors import (AssumptionViolationError, ConfigurationError,
                     DegenerateWeightsError, DomainError,
                     SubcriticalAlphaError)
from .weights import (ConstantWeight, ExpTiltWeight, OracleRatioWeight,
                      TableWeight, WeightFunction, weight_from_json,
                      weight_to_json)

__all__ = ["tau", "AsymptoticRegime", "kolmogorov_cdf", "kolmogorov_quantile",
           "fcp_uniform_band", "ScenarioSpec", "TheoryFunctions",
           "theory_functions", "fcp_pointwise_ci", "bh_asymptotic_threshold",
           "fdp_tdp_asymptotics"]

_CLAMP = 1e-9
_WEIGHT_BOUND = 1e12


def tau(n: int, m: int) -> float:
    """Effective sample size nm/(n+m); the FCP process converges at rate sqrt(tau)."""
    if n < 1 or m < 1:
        raise DomainError("sample sizes must be positive")
    return n * m / (n + m)


@dataclass(frozen=True)
class AsymptoticRegime:
    """Finite (n, m) standing in for the limit n, m -> infinity."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DomainError("sample sizes must be positive")

    @property
    def tau(self) -> float:
        return tau(self.n, self.m)

    @property
    def sigma2(self) -> float:
        """Limit of n/(n+m): the share of variance due to calibration."""
        return self.n / (self.n + self.m)


def kolmogorov_cdf(x) -> float | np.ndarray:
    """Distribution function of the sup of a standard Brownian bridge.

    cdf(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2) for x > 0; the
    alternating series is truncated once the next term drops below 1e-12.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    pos = x > 0.0
    if np.any(pos):
        xp = x[pos]
        total = np.zeros_like(xp)
        sign = 1.0
        for k in range(1, 200):
            term = np.exp(-2.0 * k * k * xp * xp)
            total += sign * term
            sign = -sign
            if np.all(term < 1e-12):
                break
        out[pos] = 1.0 - 2.0 * total
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def kolmogorov_quantile(p: float) -> float:
    """Inverse of :func:`kolmogorov_cdf` on (0, 1), by root bracketing."""
    if not 0.0 < p < 1.0:
        raise DomainError("quantile level must lie in (0, 1)")
    return float(brentq(lambda x: kolmogorov_cdf(x) - p, 1e-8, 10.0,
                        xtol=1e-12, rtol=8.9e-16))


def fcp_uniform_band(n: int, m: int, delta: float) -> tuple[float, float]:
    """Half-widths of two (1-delta) uniform bands around the stair reference.

    Returns (asymptotic_halfwidth, dkw_halfwidth): the first calibrated by
    the Kolmogorov limit of sqrt(tau) * sup|FCP - I_n|, the second the
    canonical finite-sample concentration bound sqrt(ln(2/delta)/(2 tau)).
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    t = tau(n, m)
    asymptotic = kolmogorov_quantile(1.0 - delta) / math.sqrt(t)
    dkw = math.sqrt(math.log(2.0 / delta) / (2.0 * t))
    return asymptotic, dkw


@dataclass(frozen=True)
class ScenarioSpec:
    """Distributions (and optional weight / novelty structure) of an experiment.

    ``cal`` is the calibration score law, ``test`` the test score law (the
    alternative law in novelty scenarios).  Novelty scenarios additionally
    carry ``null_dist`` (law of the null test scores) and ``pi0`` (limiting
    null proportion).  ``weight`` is the weight function applied to the
    conformal p-values, if any.
    """

    cal: ScoreDistribution
    test: ScoreDistribution
    null_dist: ScoreDistribution | None = None
    weight: WeightFunction | None = None
    pi0: float | None = None

    def __post_init__(self):
        if self.pi0 is not None and not 0.0 < self.pi0 < 1.0:
            raise ConfigurationError("pi0 must lie in (0, 1)")
        if (self.null_dist is None) != (self.pi0 is None):
            raise ConfigurationError(
                "novelty scenarios need both null_dist and pi0 (or neither)")

    def to_json(self) -> dict:
        obj = {"cal": distribution_to_json(self.cal),
               "test": distribution_to_json(self.test)}
        if self.null_dist is not None:
            obj["null"] = distribution_to_json(self.null_dist)
        if self.weight is not None:
            obj["weight"] = weight_to_json(self.weight)
        if self.pi0 is not None:
            obj["pi0"] = self.pi0
        return obj

    @staticmethod
    def from_json(obj: dict) -> "ScenarioSpec":
        return ScenarioSpec(
            cal=distribution_from_json(obj["cal"]),
            test=distribution_from_json(obj["test"]),
            null_dist=(distribution_from_json(obj["null"])
                       if obj.get("null") is not None else None),
            weight=(weight_from_json(obj["weight"])
                    if obj.get("weight") is not None else None),
            pi0=(float(obj["pi0"]) if obj.get("pi0") is not None else None),
        )


def _clamp(t) -> np.ndarray:
    return np.clip(np.asarray(t, dtype=float), _CLAMP, 1.0 - _CLAMP)


def _scalarize(t, out):
    return float(out) if np.asarray(t).ndim == 0 else np.asarray(out)


# ---------------------------------------------------------------------------
# Weight curves in standardized coordinates
#
# With U = F_cal(S) uniform and wt(u) = w(F_cal^{-1}(u)), the weighted
# calibration cdf, its inverse, the squared-weight cdf and the moment ratio
# all reduce to integrals of wt over (0, 1):
#   Fw(u)   = int_0^u wt / int_0^1 wt          (weighted calibration cdf)
#   Vw(u)   = int_0^u wt^2 / int_0^1 wt^2      (squared-weight cdf)
#   rho     = sqrt(int wt^2) / int wt >= 1     (second-moment ratio)
#   kw1     = int_0^1 wt                        (mean weight)
# ---------------------------------------------------------------------------


class _WeightCurves:
    method: str
    rho: float
    kw1: float

    def Fw(self, u):
        raise NotImplementedError

    def Fwinv(self, v):
        raise NotImplementedError

    def Vw(self, u):
        raise NotImplementedError

    def wt(self, u):
        raise NotImplementedError


class _ConstantCurves(_WeightCurves):
    """w constant: all weighted curves collapse to the identity."""

    method = "closed"

    def __init__(self, value: float = 1.0):
        self.value = float(value)
        self.rho = 1.0
        self.kw1 = self.value

    def Fw(self, u):
        return np.asarray(u, dtype=float)

    def Fwinv(self, v):
        return np.asarray(v, dtype=float)

    def Vw(self, u):
        return np.asarray(u, dtype=float)

    def wt(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.value)


class _TiltCurves(_WeightCurves):
    """Exponential calibration at rate a with weight exp(-lam x): closed forms.

    In standardized coordinates wt(u) = (1-u)^(lam/a), so all integrals are
    power functions:
      Fw(u) = 1 - (1-u)^((a+lam)/a),  Vw(u) = 1 - (1-u)^((a+2 lam)/a),
      rho = (a+lam)/sqrt(a (a+2 lam)).
    """

    method = "closed"

    def __init__(self, a: float, lam: float):
        if a + lam <= 0 or a + 2 * lam <= 0:
            raise AssumptionViolationError(
                "tilted weight is not integrable against the calibration law")
        self.a = float(a)
        self.lam = float(lam)
        self.e1 = (a + lam) / a
        self.e2 = (a + 2 * lam) / a
        self.rho = (a + lam) / math.sqrt(a * (a + 2 * lam))
        self.kw1 = a / (a + lam)

    def Fw(self, u):
        return 1.0 - (1.0 - np.asarray(u, dtype=float)) ** self.e1

    def Fwinv(self, v):
        return 1.0 - (1.0 - np.asarray(v, dtype=float)) ** (1.0 / self.e1)

    def Vw(self, u):
        return 1.0 - (1.0 - np.asarray(u, dtype=float)) ** self.e2

    def wt(self, u):
        return (1.0 - np.asarray(u, dtype=float)) ** (self.lam / self.a)


class _PiecewiseConstantCurves(_WeightCurves):
    """Exact curves for a weight that is piecewise constant in u."""

    method = "exact_piecewise"

    def __init__(self, nodes: np.ndarray, seg_values: np.ndarray):
        # nodes: 0 = n_0 < ... < n_K = 1; seg_values[i] on [n_i, n_{i+1})
        self.nodes = nodes
        self.seg_values = seg_values
        gaps = np.diff(nodes)
        self._cum1 = np.concatenate([[0.0], np.cumsum(seg_values * gaps)])
        self._cum2 = np.concatenate([[0.0], np.cumsum(seg_values ** 2 * gaps)])
        self.kw1 = float(self._cum1[-1])
        kw2 = float(self._cum2[-1])
        if self.kw1 <= 0.0:
            raise DegenerateWeightsError("weight vanishes on the whole "
                                         "calibration support")
        self.rho = math.sqrt(kw2) / self.kw1

    def Fw(self, u):
        return np.interp(np.asarray(u, dtype=float), self.nodes, self._cum1) / self.kw1

    def Fwinv(self, v):
        v = np.asarray(v, dtype=float) * self.kw1
        return np.interp(v, self._cum1, self.nodes)

    def Vw(self, u):
        return np.interp(np.asarray(u, dtype=float), self.nodes, self._cum2) / self._cum2[-1]

    def wt(self, u):
        idx = np.searchsorted(self.nodes[1:-1], np.asarray(u, dtype=float),
                              side="right")
        return self.seg_values[idx]


class _QuadratureCurves(_WeightCurves):
    """Generic weight: cumulative Simpson integration on a dense grid."""

    method = "quadrature"
    _GRID = 8193

    def __init__(self, wt_callable):
        self._wt_callable = wt_callable
        u = np.linspace(0.0, 1.0, self._GRID)
        vals = np.asarray(wt_callable(np.clip(u, _CLAMP, 1.0 - _CLAMP)),
                          dtype=float)
        if not np.all(np.isfinite(vals)) or np.max(vals) > _WEIGHT_BOUND:
            raise AssumptionViolationError(
                "weight is unbounded on the calibration support")
        self._grid = u
        self._cum1 = cumulative_simpson(vals, x=u, initial=0.0)
        self._cum2 = cumulative_simpson(vals ** 2, x=u, initial=0.0)
        self.kw1 = float(self._cum1[-1])
        kw2 = float(self._cum2[-1])
        if self.kw1 <= 0.0:
            raise DegenerateWeightsError("weight vanishes on the whole "
                                         "calibration support")
        self.rho = math.sqrt(kw2) / self.kw1

    def Fw(self, u):
        return np.interp(np.asarray(u, dtype=float), self._grid, self._cum1) / self.kw1

    def Fwinv(self, v):
        v = np.asarray(v, dtype=float) * self.kw1
        return np.interp(v, self._cum1, self._grid)

    def Vw(self, u):
        return np.interp(np.asarray(u, dtype=float), self._grid, self._cum2) / self._cum2[-1]

    def wt(self, u):
        u = np.clip(np.asarray(u, dtype=float), _CLAMP, 1.0 - _CLAMP)
        return np.asarray(self._wt_callable(u), dtype=float)


def _build_weight_curves(cal: ScoreDistribution, weight: WeightFunction,
                         force_quadrature: bool) -> _WeightCurves:
    if isinstance(weight, ConstantWeight):
        return _ConstantCurves(weight.value)
    if isinstance(weight, ExpTiltWeight) and weight.lam < 0 \
            and cal.support()[1] == math.inf:
        raise AssumptionViolationError(
            "negatively tilted exponential weight is unbounded on an "
            "unbounded calibration support")
    if not force_quadrature and isinstance(cal, Exponential):
        if isinstance(weight, ExpTiltWeight):
            return _TiltCurves(cal.rate, weight.lam)
        if isinstance(weight, OracleRatioWeight) and weight.cal == cal \
                and isinstance(weight.target, Exponential):
            # the ratio is a constant times exp(-(b-a)x): the constant
            # cancels in every normalized curve
            return _TiltCurves(cal.rate, weight.target.rate - cal.rate)
    if isinstance(weight, TableWeight):
        breaks = np.asarray(cal.cdf(np.asarray(weight.breakpoints)), dtype=float)
        nodes = np.concatenate([[0.0], breaks, [1.0]])
        keep = np.concatenate([[True], np.diff(nodes) > 0])
        nodes = nodes[keep]
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        seg = np.asarray(weight(cal.quantile(np.clip(mids, _CLAMP, 1 - _CLAMP))),
                         dtype=float)
        return _PiecewiseConstantCurves(nodes, seg)
    return _QuadratureCurves(lambda u: weight(cal.quantile(u)))


class TheoryFunctions:
    """The limit curves of a scenario, evaluable on (0, 1).

    All curves are derived from two ingredients in standardized coordinates:
    the composition F_test o F_cal^{-1} (and its null counterpart) and the
    weight integral curves.  Curves with closed-form weight integrals use
    them exactly; otherwise dense-grid quadrature is used (``method``).
    """

    def __init__(self, scenario: ScenarioSpec, force_quadrature: bool = False):
        self.scenario = scenario
        self.pi0 = scenario.pi0
        weight = scenario.weight if scenario.weight is not None else ConstantWeight(1.0)
        self._curves = _build_weight_curves(scenario.cal, weight,
                                            force_quadrature)
        self.method = self._curves.method

    # -- raw compositions ---------------------------------------------------
    def _cdf_through_cal(self, dist: ScoreDistribution, u):
        x = self.scenario.cal.quantile(_clamp(u))
        return np.asarray(dist.cdf(x), dtype=float)

    def _density_ratio(self, dist: ScoreDistribution, u):
        """d(F_dist o F_cal^{-1})/du = pdf_dist / pdf_cal at the cal quantile."""
        x = self.scenario.cal.quantile(_clamp(u))
        den = np.asarray(self.scenario.cal.pdf(x), dtype=float)
        num = np.asarray(dist.pdf(x), dtype=float)
        return num / den

    def _require_null(self):
        if self.scenario.null_dist is None:
            raise ConfigurationError("scenario has no null distribution")

    # -- unweighted limit curves --------------------------------------------
    def G(self, t):
        """Limit cdf of the conformal p-values under shift: 1 - Ftc(1-t)."""
        u = 1.0 - _clamp(t)
        return _scalarize(t, 1.0 - self._cdf_through_cal(self.scenario.test, u))

    def G_prime(self, t):
        return _scalarize(t, self._density_ratio(self.scenario.test,
                                                 1.0 - _clamp(t)))

    def G0(self, t):
        """Same as G for the null test-score law."""
        self._require_null()
        u = 1.0 - _clamp(t)
        return _scalarize(t, 1.0 - self._cdf_through_cal(self.scenario.null_dist, u))

    def G0_prime(self, t):
        self._require_null()
        return _scalarize(t, self._density_ratio(self.scenario.null_dist,
                                                 1.0 - _clamp(t)))

    # -- weighted limit curves ----------------------------------------------
    @property
    def rho_w(self) -> float:
        return self._curves.rho

    def Fw_cal(self, u):
        """Weighted calibration cdf, standardized coordinates."""
        return _scalarize(u, self._curves.Fw(_clamp(u)))

    def Vw_cal(self, u):
        """Squared-weight calibration cdf, standardized coordinates."""
        return _scalarize(u, self._curves.Vw(_clamp(u)))

    def Iw(self, t):
        """1 - Vw_cal o Fw_cal^{-1}(1 - t), the weighted variance time change."""
        q = self._curves.Fwinv(1.0 - _clamp(t))
        return _scalarize(t, 1.0 - self._curves.Vw(q))

    def Gw(self, t):
        """Limit cdf of the weighted conformal p-values."""
        q = self._curves.Fwinv(1.0 - _clamp(t))
        return _scalarize(t, 1.0 - self._cdf_through_cal(self.scenario.test, q))

    def Gw_prime(self, t):
        q = self._curves.Fwinv(1.0 - _clamp(t))
        ratio = self._density_ratio(self.scenario.test, q)
        return _scalarize(t, ratio * self._curves.kw1 / self._curves.wt(q))

    def G0w(self, t):
        self._require_null()
        q = self._curves.Fwinv(1.0 - _clamp(t))
        return _scalarize(t, 1.0 - self._cdf_through_cal(self.scenario.null_dist, q))

    def G0w_prime(self, t):
        self._require_null()
        q = self._curves.Fwinv(1.0 - _clamp(t))
        ratio = self._density_ratio(self.scenario.null_dist, q)
        return _scalarize(t, ratio * self._curves.kw1 / self._curves.wt(q))

    # -- mixtures -------------------------------------------------------------
    def _mix(self, f0, f1, t):
        self._require_null()
        if self.pi0 is None:
            raise ConfigurationError("scenario has no pi0")
        return self.pi0 * np.asarray(f0(t)) + (1.0 - self.pi0) * np.asarray(f1(t))

    def Gmixt(self, t):
        return _scalarize(t, self._mix(self.G0, self.G, t))

    def Gmixt_prime(self, t):
        return _scalarize(t, self._mix(self.G0_prime, self.G_prime, t))

    def Gmixtw(self, t):
        return _scalarize(t, self._mix(self.G0w, self.Gw, t))

    def Gmixtw_prime(self, t):
        return _scalarize(t, self._mix(self.G0w_prime, self.Gw_prime, t))


def theory_functions(scenario: ScenarioSpec,
                     force_quadrature: bool = False) -> TheoryFunctions:
    """Build the limit curves of a scenario.

    ``force_quadrature`` bypasses the closed-form weight integrals, which is
    useful for cross-checking the two evaluation paths against each other.
    """
    return TheoryFunctions(scenario, force_quadrature=force_quadrature)


def fcp_pointwise_ci(alpha: float, level: float, regime: AsymptoticRegime,
                     theory: TheoryFunctions) -> tuple[float, float, float]:
    """Asymptotic mean and confidence interval for FCP(alpha).

    The limit at alpha is Gaussian with mean Gw(alpha) and variance
    [sigma^2 Gw(1-Gw) + (1-sigma^2) rho^2 Gw'^2 (Iw(1-Iw)+(alpha-Iw)^2)]/tau;
    the unweighted case (constant weight) reduces to
    [sigma^2 G(1-G) + (1-sigma^2) G'^2 alpha(1-alpha)]/tau.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not 0.0 < level < 1.0:
        raise DomainError("confidence level must lie in (0, 1)")
    s2 = regime.sigma2
    gw = theory.Gw(alpha)
    gwp = theory.Gw_prime(alpha)
    iw = theory.Iw(alpha)
    rho = theory.rho_w
    var = (s2 * gw * (1.0 - gw)
           + (1.0 - s2) * rho ** 2 * gwp ** 2
           * (iw * (1.0 - iw) + (alpha - iw) ** 2)) / regime.tau
    z = float(ndtri(0.5 * (1.0 + level)))
    half = z * math.sqrt(max(var, 0.0))
    return gw, gw - half, gw + half


def bh_asymptotic_threshold(alpha: float, theory: TheoryFunctions,
                            weighted: bool = False) -> float:
    """Largest t in (0, 1) with Gmixt(t) >= t/alpha (asymptotic BH threshold).

    Raises :class:`SubcriticalAlphaError` when no such t exists, i.e. when
    alpha is at or below the critical level 1/Gmixt'(0+): in that regime
    the step-up procedure asymptotically rejects nothing.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    gm = theory.Gmixtw if weighted else theory.Gmixt

    def h(t):
        return gm(t) - t / alpha

    # T_alpha <= alpha because Gmixt <= 1, so scan (0, alpha] only
    ts = np.geomspace(1e-8, alpha, 600)
    hs = np.asarray(gm(ts)) - ts / alpha
    pos = np.nonzero(hs > 0.0)[0]
    if pos.size == 0:
        exact = np.nonzero(hs == 0.0)[0]
        if exact.size:
            return float(ts[exact[-1]])
        raise SubcriticalAlphaError(
            f"alpha={alpha} is at or below the critical level: the mixture "
            "curve never exceeds t/alpha, so the procedure has no "
            "asymptotic power")
    last = int(pos[-1])
    if last == ts.size - 1:
        root = alpha  # Gmixt(alpha) >= 1, threshold saturates at alpha
    else:
        root = float(brentq(h, ts[last], ts[last + 1], xtol=1e-14,
                            rtol=8.9e-16))
    if abs(gm(root) - root / alpha) > 1e-8:
        raise AssumptionViolationError(
            "threshold root did not converge; the mixture curve is likely "
            "not strictly concave")
    return root


def _check_identity(curve, what: str) -> None:
    ts = np.linspace(0.05, 0.95, 7)
    if np.max(np.abs(np.asarray(curve(ts)) - ts)) > 1e-6:
        raise AssumptionViolationError(what)


def fdp_tdp_asymptotics(alpha: float, regime: AsymptoticRegime,
                        theory: TheoryFunctions, mode: str) -> dict:
    """Asymptotic moments of FDP/TDP for the step-up procedure at level alpha.

    Returns {fdp_mean, fdp_var_scaled, tdp_mean, tdp_var_scaled, threshold}
    where the ``_var_scaled`` entries are variances of the sqrt(tau)-scaled
    limits (divide by tau for the finite-sample approximation).

    mode:
      * ``unweighted``: plain conformal p-values, requires null law = cal law.
      * ``oracle_weighted``: weight = oracle density ratio d(null)/d(cal).
      * ``general_weighted``: arbitrary bounded weight; the variance is
        assembled from the limit-process covariances (no closed display
        exists for this case) and is validated by simulation.
    """
    if theory.pi0 is None or theory.scenario.null_dist is None:
        raise ConfigurationError("FDP/TDP asymptotics need a novelty scenario "
                                 "(null_dist and pi0)")
    s2 = regime.sigma2
    pi0 = theory.pi0

    if mode == "unweighted":
        _check_identity(theory.G0, "unweighted FDP/TDP asymptotics require "
                        "the null law to equal the calibration law")
        T = bh_asymptotic_threshold(alpha, theory, weighted=False)
        fdp_mean = pi0 * alpha
        fdp_var = alpha ** 2 * pi0 * (s2 + (1.0 - s2) * pi0) * (1.0 - T) / T
        g = theory.G(T)
        gp = theory.G_prime(T)
        gmp = theory.Gmixt_prime(T)
        sigma_big = (gp ** 2 * T * (1.0 - T) * (pi0 * s2 + (1.0 - s2) / alpha ** 2)
                     + (1.0 / alpha - pi0) ** 2 / (1.0 - pi0)
                     * g * (1.0 - g) * s2)
        tdp_mean = g
        tdp_var = sigma_big / (1.0 / alpha - gmp) ** 2
    elif mode == "oracle_weighted":
        _check_identity(theory.G0w, "oracle-weighted FDP/TDP asymptotics "
                        "require the weight to be the null/calibration "
                        "density ratio (G0w must be the identity)")
        T = bh_asymptotic_threshold(alpha, theory, weighted=True)
        rho = theory.rho_w
        iw = theory.Iw(T)
        gw = theory.Gw(T)
        gwp = theory.Gw_prime(T)
        gmwp = theory.Gmixtw_prime(T)
        xi = s2 + (1.0 - s2) * rho ** 2 * pi0 \
            * (iw / T + T - 2.0 * iw) / (1.0 - T)
        fdp_mean = pi0 * alpha
        fdp_var = alpha ** 2 * pi0 * xi * (1.0 - T) / T
        # the middle term carries the variance of the shared weighted
        # quantile process, W(Iw) + (t - Iw) N, evaluated at T -- the same
        # quadratic that appears in xi above (validated by simulation)
        var_q = iw * (1.0 - iw) + (T - iw) ** 2
        sigma_big = (gwp ** 2 * T * (1.0 - T) * pi0 * s2
                     + (rho * gwp / alpha) ** 2 * var_q * (1.0 - s2)
                     + (1.0 / alpha - pi0) ** 2 / (1.0 - pi0)
                     * gw * (1.0 - gw) * s2)
        tdp_mean = gw
        tdp_var = sigma_big / (1.0 / alpha - gmwp) ** 2
    elif mode == "general_weighted":
        T = bh_asymptotic_threshold(alpha, theory, weighted=True)
        rho = theory.rho_w
        iw = theory.Iw(T)
        g0w = theory.G0w(T)
        g0wp = theory.G0w_prime(T)
        gw = theory.Gw(T)
        gwp = theory.Gw_prime(T)
        gmw = theory.Gmixtw(T)
        gmwp = theory.Gmixtw_prime(T)
        p = pi0 * g0w / gmw
        zeta = 1.0 - (1.0 - pi0) * (g0wp * gw - g0w * gwp) \
            / ((1.0 / alpha - gmwp) * g0w)
        # limit-process covariances at T: each process is an independent
        # bridge term plus a shared weighted-quantile term with variance
        # proportional to Iw(1-Iw) + (T-Iw)^2
        var_q = iw * (1.0 - iw) + (T - iw) ** 2
        v0 = s2 / pi0 * g0w * (1.0 - g0w) + g0wp ** 2 * rho ** 2 * (1.0 - s2) * var_q
        v1 = s2 / (1.0 - pi0) * gw * (1.0 - gw) + gwp ** 2 * rho ** 2 * (1.0 - s2) * var_q
        c01 = g0wp * gwp * rho ** 2 * (1.0 - s2) * var_q
        a = p * (1.0 - p * zeta) / g0w
        b = -p * (1.0 - p) * zeta / gw
        fdp_mean = p
        fdp_var = a * a * v0 + 2.0 * a * b * c01 + b * b * v1
        c = gwp / (1.0 / alpha - gmwp)
        var_z = pi0 ** 2 * v0 + 2.0 * pi0 * (1.0 - pi0) * c01 + (1.0 - pi0) ** 2 * v1
        cov_z_z1 = pi0 * c01 + (1.0 - pi0) * v1
        tdp_mean = gw
        tdp_var = c * c * var_z + 2.0 * c * cov_z_z1 + v1
    else:
        raise ConfigurationError(f"unknown mode: {mode!r}")

    return {"fdp_mean": float(fdp_mean), "fdp_var_scaled": float(fdp_var),
            "tdp_mean": float(tdp_mean), "tdp_var_scaled": float(tdp_var),
            "threshold": float(T)}
