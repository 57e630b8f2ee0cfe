"""Seeded Monte Carlo harness for the conformal limit theorems.

Runs replicated experiments at desk scale (FCP processes, sup statistics,
BH false/true discovery proportions), compares the empirical moments with
the asymptotic predictions, and reproduces the band-comparison and
weighted-CI tables.  Replication r draws its calibration sample from stream
r and its test sample(s) from disjoint stream blocks, so results are
bit-identical for a fixed master seed regardless of the worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .conformal import conformal_pvalues, weighted_conformal_pvalues
from .distributions import Exponential, Uniform01
from .empirical import (LabeledPValues, bh_reject, ecdf, fdp_tdp,
                        reference_In, sup_deviation)
from .errors import ConfigurationError, DomainError, SubcriticalAlphaError
from .limits import (AsymptoticRegime, ScenarioSpec, TheoryFunctions,
                     fcp_pointwise_ci, fcp_uniform_band, fdp_tdp_asymptotics,
                     kolmogorov_quantile, theory_functions)
from .rng import SeededRng
from .weights import ExpTiltWeight

__all__ = ["ExperimentConfig", "ExperimentResult", "run_fcp_experiment",
           "run_bh_experiment", "run_experiment", "empirical_quantile",
           "reproduce_fig1", "reproduce_fig2", "write_result"]

SCHEMA_VERSION = 1

_FCP_MODES = ("fcp_sup", "fcp_pointwise", "weighted_fcp")
_BH_MODES = ("bh_fdp", "weighted_bh")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to rerun an experiment deterministically."""

    scenario: ScenarioSpec
    n: int
    m: int
    alphas: tuple
    delta: float
    reps: int
    master_seed: int
    mode: str

    def __post_init__(self):
        if self.mode not in _FCP_MODES + _BH_MODES:
            raise ConfigurationError(f"unknown mode: {self.mode!r}")
        if self.reps < 1:
            raise ConfigurationError("reps must be at least 1")
        if self.n < 1 or self.m < 1:
            raise ConfigurationError("sample sizes must be positive")
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or any(not 0.0 < a < 1.0 for a in alphas):
            raise ConfigurationError("alphas must be a nonempty subset of (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError("delta must lie in (0, 1)")
        if self.mode in _BH_MODES and (self.scenario.pi0 is None
                                       or self.scenario.null_dist is None):
            raise ConfigurationError(
                "novelty modes require scenario.pi0 and scenario.null_dist")
        if self.mode in ("weighted_fcp", "weighted_bh") \
                and self.scenario.weight is None:
            raise ConfigurationError("weighted modes require scenario.weight")
        object.__setattr__(self, "alphas", alphas)

    @property
    def regime(self) -> AsymptoticRegime:
        return AsymptoticRegime(self.n, self.m)

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION,
                "scenario": self.scenario.to_json(),
                "n": self.n, "m": self.m, "alphas": list(self.alphas),
                "delta": self.delta, "reps": self.reps,
                "master_seed": self.master_seed, "mode": self.mode}

    @staticmethod
    def from_json(obj: dict) -> "ExperimentConfig":
        try:
            return ExperimentConfig(
                scenario=ScenarioSpec.from_json(obj["scenario"]),
                n=int(obj["n"]), m=int(obj["m"]),
                alphas=tuple(obj["alphas"]), delta=float(obj["delta"]),
                reps=int(obj["reps"]), master_seed=int(obj["master_seed"]),
                mode=str(obj["mode"]))
        except KeyError as exc:
            raise ConfigurationError(f"config is missing key /{exc.args[0]}")


@dataclass(frozen=True)
class ExperimentResult:
    """Per-replication records plus summary and theory overlay."""

    config: ExperimentConfig
    records: pd.DataFrame
    summary: dict
    theory: dict


def empirical_quantile(samples, p: float) -> float:
    """Interpolated order statistic (type-7); p=0/1 clamp to min/max."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise DomainError("empirical quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise DomainError("quantile level must lie in [0, 1]")
    return float(np.quantile(samples, p))


def _alpha_col(prefix: str, alpha: float) -> str:
    return f"{prefix}_{alpha:g}"


def _pvalues_for(cfg: ExperimentConfig, cal: np.ndarray,
                 test: np.ndarray) -> np.ndarray:
    if cfg.mode in ("weighted_fcp", "weighted_bh"):
        return weighted_conformal_pvalues(cal, test, cfg.scenario.weight)
    return conformal_pvalues(cal, test)


def _one_fcp_rep(cfg: ExperimentConfig, r: int) -> dict:
    cal = cfg.scenario.cal.sample(SeededRng(cfg.master_seed, r), cfg.n)
    test = cfg.scenario.test.sample(
        SeededRng(cfg.master_seed, r + cfg.reps), cfg.m)
    pvalues = _pvalues_for(cfg, cal, test)
    curve = ecdf(pvalues)
    record = {"rep": r,
              "sup_stat": sup_deviation(curve, reference_In(cfg.n))}
    for alpha in cfg.alphas:
        record[_alpha_col("fcp", alpha)] = curve(alpha)
    return record


def _one_bh_rep(cfg: ExperimentConfig, r: int) -> dict:
    scenario = cfg.scenario
    m0 = int(math.floor(scenario.pi0 * cfg.m))
    m1 = cfg.m - m0
    cal = scenario.cal.sample(SeededRng(cfg.master_seed, r), cfg.n)
    nulls = scenario.null_dist.sample(
        SeededRng(cfg.master_seed, r + cfg.reps), m0)
    alts = scenario.test.sample(
        SeededRng(cfg.master_seed, r + 2 * cfg.reps), m1)
    test = np.concatenate([nulls, alts])
    pvalues = _pvalues_for(cfg, cal, test)
    labels = LabeledPValues(pvalues, np.arange(cfg.m) < m0)
    record = {"rep": r}
    for alpha in cfg.alphas:
        outcome = bh_reject(pvalues, alpha)
        fdp, tdp = fdp_tdp(outcome, labels)
        record[_alpha_col("fdp", alpha)] = fdp
        record[_alpha_col("tdp", alpha)] = tdp
        record[_alpha_col("bh_threshold", alpha)] = outcome.threshold
    return record


def _rep_block(cfg_json: dict, kind: str, rep_indices: list) -> list:
    cfg = ExperimentConfig.from_json(cfg_json)
    one = _one_fcp_rep if kind == "fcp" else _one_bh_rep
    return [one(cfg, r) for r in rep_indices]


def _collect_records(cfg: ExperimentConfig, kind: str,
                     workers: int) -> pd.DataFrame:
    indices = list(range(cfg.reps))
    if workers <= 1:
        rows = _rep_block(cfg.to_json(), kind, indices)
    else:
        blocks = [indices[i::workers] for i in range(workers)]
        cfg_json = cfg.to_json()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_rep_block, cfg_json, kind, b)
                       for b in blocks if b]
            rows = [row for f in futures for row in f.result()]
    rows.sort(key=lambda rec: rec["rep"])
    return pd.DataFrame(rows)


def _column_summary(records: pd.DataFrame) -> dict:
    out = {}
    for col in records.columns:
        if col == "rep":
            continue
        values = records[col].to_numpy()
        out[col] = {"mean": float(np.mean(values)),
                    "var": float(np.var(values, ddof=1)) if values.size > 1 else 0.0,
                    "se": (float(np.std(values, ddof=1) / math.sqrt(values.size))
                           if values.size > 1 else 0.0)}
    return out


def _bootstrap_quantile_se(samples: np.ndarray, p: float,
                           rng: SeededRng) -> float:
    if samples.size < 2:
        return 0.0
    gen = rng.generator()
    idx = gen.integers(0, samples.size, size=(200, samples.size))
    boot = np.quantile(samples[idx], p, axis=1)
    return float(np.std(boot, ddof=1))


def run_fcp_experiment(cfg: ExperimentConfig,
                       workers: int = 1) -> ExperimentResult:
    """Replicated FCP experiment: p-values, FCP curve, sup statistic."""
    if cfg.mode not in _FCP_MODES:
        raise ConfigurationError(f"not an FCP mode: {cfg.mode!r}")
    records = _collect_records(cfg, "fcp", workers)
    regime = cfg.regime
    sup = records["sup_stat"].to_numpy()
    scaled = math.sqrt(regime.tau) * sup
    asym_half, dkw_half = fcp_uniform_band(cfg.n, cfg.m, cfg.delta)
    summary = _column_summary(records)
    summary["sup_stat"].update({
        "quantile_level": 1.0 - cfg.delta,
        "quantile": empirical_quantile(sup, 1.0 - cfg.delta),
        "scaled_quantile": empirical_quantile(scaled, 1.0 - cfg.delta),
        "scaled_quantile_se": _bootstrap_quantile_se(
            scaled, 1.0 - cfg.delta,
            SeededRng(cfg.master_seed, 3 * cfg.reps)),
        "band_coverage": float(np.mean(sup <= asym_half)),
    })

    theory = theory_functions(cfg.scenario)
    overlay = {"tau": regime.tau, "sigma2": regime.sigma2,
               "asymptotic_halfwidth": asym_half, "dkw_halfwidth": dkw_half,
               "kolmogorov_quantile": kolmogorov_quantile(1.0 - cfg.delta),
               "fcp": {}}
    for alpha in cfg.alphas:
        mean, lo, hi = fcp_pointwise_ci(alpha, 0.95, regime, theory)
        gw = theory.Gw(alpha)
        gwp = theory.Gw_prime(alpha)
        iw = theory.Iw(alpha)
        s2 = regime.sigma2
        var = (s2 * gw * (1.0 - gw)
               + (1.0 - s2) * theory.rho_w ** 2 * gwp ** 2
               * (iw * (1.0 - iw) + (alpha - iw) ** 2)) / regime.tau
        overlay["fcp"][f"{alpha:g}"] = {"mean": mean, "var": var,
                                        "ci95_lo": lo, "ci95_hi": hi}
    return ExperimentResult(cfg, records, summary, overlay)


def _overlay_mode(cfg: ExperimentConfig, theory: TheoryFunctions) -> str:
    if cfg.mode == "bh_fdp":
        return "unweighted"
    ts = np.linspace(0.05, 0.95, 7)
    if np.max(np.abs(np.asarray(theory.G0w(ts)) - ts)) < 1e-6:
        return "oracle_weighted"
    return "general_weighted"


def run_bh_experiment(cfg: ExperimentConfig,
                      workers: int = 1) -> ExperimentResult:
    """Replicated novelty-detection experiment: step-up FDP/TDP per alpha."""
    if cfg.mode not in _BH_MODES:
        raise ConfigurationError(f"not a BH mode: {cfg.mode!r}")
    records = _collect_records(cfg, "bh", workers)
    regime = cfg.regime
    summary = _column_summary(records)

    theory = theory_functions(cfg.scenario)
    overlay = {"tau": regime.tau, "sigma2": regime.sigma2,
               "pi0": cfg.scenario.pi0, "mode": _overlay_mode(cfg, theory),
               "alphas": {}}
    for alpha in cfg.alphas:
        try:
            moments = fdp_tdp_asymptotics(alpha, regime, theory,
                                          overlay["mode"])
            moments["subcritical"] = False
        except SubcriticalAlphaError:
            moments = {"subcritical": True}
        overlay["alphas"][f"{alpha:g}"] = moments
    return ExperimentResult(cfg, records, summary, overlay)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Dispatch on the config mode."""
    if cfg.mode in _FCP_MODES:
        return run_fcp_experiment(cfg, workers=workers)
    return run_bh_experiment(cfg, workers=workers)


def write_result(result: ExperimentResult, out_dir: str) -> None:
    """Write records.csv and summary.json (config echo included) to out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    result.records.to_csv(os.path.join(out_dir, "records.csv"), index=False)
    payload = {"schema_version": SCHEMA_VERSION,
               "config": result.config.to_json(),
               "summary": result.summary,
               "theory": result.theory}
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def reproduce_fig1(n_list, m_list, deltas, reps: int, seed: int,
                   workers: int = 1) -> pd.DataFrame:
    """Sup-statistic quantiles: Monte Carlo vs asymptotic vs concentration bound.

    One exchangeable Uniform(0,1) experiment per (n, m) pair; each row gives,
    for one delta, the empirical (1-delta)-quantile of sup|FCP - I_n| with a
    bootstrap SE next to the Kolmogorov-calibrated and concentration-bound
    half-widths.
    """
    scenario = ScenarioSpec(cal=Uniform01(), test=Uniform01())
    rows = []
    for i_n, n in enumerate(n_list):
        for i_m, m in enumerate(m_list):
            cfg = ExperimentConfig(
                scenario=scenario, n=int(n), m=int(m), alphas=(0.1,),
                delta=min(deltas), reps=reps,
                master_seed=seed + 1000 * (i_n * len(m_list) + i_m),
                mode="fcp_sup")
            records = _collect_records(cfg, "fcp", workers)
            sup = records["sup_stat"].to_numpy()
            for delta in deltas:
                asym, dkw = fcp_uniform_band(cfg.n, cfg.m, delta)
                rows.append({
                    "n": cfg.n, "m": cfg.m, "delta": delta,
                    "mc_quantile": empirical_quantile(sup, 1.0 - delta),
                    "mc_se": _bootstrap_quantile_se(
                        sup, 1.0 - delta,
                        SeededRng(cfg.master_seed, 3 * cfg.reps)),
                    "asymptotic_halfwidth": asym,
                    "dkw_halfwidth": dkw,
                })
    return pd.DataFrame(rows)


def reproduce_fig2(delta_grid, alpha: float, ci_level: float, n: int, m: int,
                   mc_reps: int | None = None, seed: int = 0,
                   workers: int = 1) -> pd.DataFrame:
    """Weighted-conformal FCP mean and CI versus the weight mistuning Delta.

    Calibration scores are Exponential(1) and test scores Exponential(3);
    the weight exp(-(2+Delta)x) is the oracle density ratio at Delta=0, where
    the asymptotic FCP mean is exactly alpha.  Optional Monte Carlo columns
    replicate the experiment at each Delta.
    """
    regime = AsymptoticRegime(n, m)
    rows = []
    for i, dlt in enumerate(delta_grid):
        weight = ExpTiltWeight(2.0 + float(dlt))
        scenario = ScenarioSpec(cal=Exponential(1.0), test=Exponential(3.0),
                                weight=weight)
        theory = theory_functions(scenario)
        mean, lo, hi = fcp_pointwise_ci(alpha, ci_level, regime, theory)
        row = {"delta": float(dlt), "mean": mean, "ci_lo": lo, "ci_hi": hi}
        if mc_reps:
            cfg = ExperimentConfig(
                scenario=scenario, n=n, m=m, alphas=(alpha,), delta=0.05,
                reps=mc_reps, master_seed=seed + 1000 * i,
                mode="weighted_fcp")
            records = _collect_records(cfg, "fcp", workers)
            fcp = records[_alpha_col("fcp", alpha)].to_numpy()
            row["mc_mean"] = float(np.mean(fcp))
            row["mc_var"] = float(np.var(fcp, ddof=1))
        rows.append(row)
    return pd.DataFrame(rows)
