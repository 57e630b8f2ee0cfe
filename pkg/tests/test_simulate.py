import json

import numpy as np
import pytest

from conformal_asymptotics import (DomainError, ExperimentConfig, Exponential,
                                   ExpTiltWeight, ScenarioSpec, Uniform01,
                                   empirical_quantile, reproduce_fig1,
                                   reproduce_fig2, run_bh_experiment,
                                   run_experiment, run_fcp_experiment,
                                   write_result)
from conformal_asymptotics.errors import ConfigurationError

EXCHANGEABLE = ScenarioSpec(cal=Uniform01(), test=Uniform01())
NOVELTY = ScenarioSpec(cal=Exponential(1.0), test=Exponential(0.5),
                       null_dist=Exponential(1.0), pi0=0.8)


def _fcp_cfg(**kw):
    base = dict(scenario=EXCHANGEABLE, n=100, m=100, alphas=(0.1, 0.5),
                delta=0.05, reps=40, master_seed=7, mode="fcp_sup")
    base.update(kw)
    return ExperimentConfig(**base)


def test_empirical_quantile():
    assert empirical_quantile([1.0, 2.0, 3.0, 4.0], 0.5) == 2.5
    assert empirical_quantile([1.0, 2.0, 3.0, 4.0], 1.0) == 4.0
    assert empirical_quantile([1.0, 2.0, 3.0, 4.0], 0.0) == 1.0
    with pytest.raises(DomainError):
        empirical_quantile([], 0.5)
    with pytest.raises(DomainError):
        empirical_quantile([1.0], 1.5)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        _fcp_cfg(mode="bogus")
    with pytest.raises(ConfigurationError):
        _fcp_cfg(alphas=())
    with pytest.raises(ConfigurationError):
        _fcp_cfg(reps=0)
    with pytest.raises(ConfigurationError):
        _fcp_cfg(mode="bh_fdp")  # no null_dist/pi0
    with pytest.raises(ConfigurationError):
        _fcp_cfg(mode="weighted_fcp")  # no weight


def test_config_json_roundtrip():
    cfg = _fcp_cfg()
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
    obj = cfg.to_json()
    del obj["reps"]
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_json(obj)


def test_fcp_experiment_shape_and_summary():
    cfg = _fcp_cfg()
    res = run_fcp_experiment(cfg)
    assert len(res.records) == cfg.reps
    assert list(res.records["rep"]) == list(range(cfg.reps))
    for col in ("sup_stat", "fcp_0.1", "fcp_0.5"):
        assert col in res.records.columns
    assert "quantile" in res.summary["sup_stat"]
    assert res.theory["fcp"]["0.1"]["mean"] == pytest.approx(0.1, abs=1e-12)
    assert 0.0 <= res.summary["sup_stat"]["band_coverage"] <= 1.0


def test_workers_bit_identical_fcp():
    cfg = _fcp_cfg(reps=30)
    a = run_fcp_experiment(cfg, workers=1)
    b = run_fcp_experiment(cfg, workers=4)
    assert a.records.equals(b.records)
    assert a.summary == b.summary


def test_workers_bit_identical_bh():
    cfg = ExperimentConfig(scenario=NOVELTY, n=200, m=200, alphas=(0.2,),
                           delta=0.05, reps=20, master_seed=9, mode="bh_fdp")
    a = run_bh_experiment(cfg, workers=1)
    b = run_bh_experiment(cfg, workers=4)
    assert a.records.equals(b.records)


def test_bh_experiment_tracks_theory():
    cfg = ExperimentConfig(scenario=NOVELTY, n=400, m=400, alphas=(0.2,),
                           delta=0.05, reps=120, master_seed=3, mode="bh_fdp")
    res = run_experiment(cfg)
    overlay = res.theory["alphas"]["0.2"]
    assert not overlay["subcritical"]
    assert overlay["fdp_mean"] == pytest.approx(0.16, abs=1e-12)
    # the Monte Carlo mean should be in the right neighbourhood even at
    # this desk scale (the acceptance suite checks tight tolerances)
    assert abs(res.summary["fdp_0.2"]["mean"] - 0.16) < 0.06
    assert abs(res.summary["tdp_0.2"]["mean"] - 1.0 / 21.0) < 0.02


def test_bh_subcritical_flagged_not_raised():
    s = ScenarioSpec(cal=Exponential(1.0), test=Exponential(0.9),
                     null_dist=Exponential(1.0), pi0=0.95)
    cfg = ExperimentConfig(scenario=s, n=100, m=100, alphas=(0.05,),
                           delta=0.05, reps=5, master_seed=1, mode="bh_fdp")
    res = run_bh_experiment(cfg)
    assert res.theory["alphas"]["0.05"]["subcritical"] is True


def test_write_result_deterministic(tmp_path):
    cfg = _fcp_cfg(reps=15)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    write_result(run_fcp_experiment(cfg), str(out1))
    write_result(run_fcp_experiment(cfg), str(out2))
    for name in ("records.csv", "summary.json"):
        assert (out1 / name).exists()
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    payload = json.loads((out1 / "summary.json").read_text())
    assert payload["schema_version"] == 1
    assert payload["config"]["n"] == cfg.n


def test_reproduce_fig1_smoke():
    df = reproduce_fig1(n_list=[80], m_list=[80, 200], deltas=[0.05, 0.2],
                        reps=120, seed=5)
    assert len(df) == 4
    assert set(df.columns) == {"n", "m", "delta", "mc_quantile", "mc_se",
                               "asymptotic_halfwidth", "dkw_halfwidth"}
    # the concentration bound dominates the asymptotic band at delta = 0.05
    d05 = df[df["delta"] == 0.05]
    assert (d05["dkw_halfwidth"] > d05["asymptotic_halfwidth"]).all()
    # and should sit above the Monte Carlo quantile up to noise
    assert (df["dkw_halfwidth"] > df["mc_quantile"] - 2 * df["mc_se"]).all()


def test_reproduce_fig2_smoke():
    deltas = [-0.5, 0.0, 0.5, 1.0]
    df = reproduce_fig2(deltas, alpha=0.2, ci_level=0.8, n=500, m=500)
    np.testing.assert_allclose(df["mean"],
                               [0.2 ** (3.0 / (3.0 + d)) for d in deltas],
                               atol=1e-10)
    assert df.loc[1, "mean"] == pytest.approx(0.2, abs=1e-12)
    # the asymptotic mean alpha^(3/(3+Delta)) increases with Delta
    assert (np.diff(df["mean"]) > 0).all()
    assert (df["ci_lo"] < df["mean"]).all() and (df["mean"] < df["ci_hi"]).all()


def test_reproduce_fig2_with_mc():
    df = reproduce_fig2([0.0], alpha=0.2, ci_level=0.8, n=300, m=300,
                        mc_reps=150, seed=21)
    assert abs(df.loc[0, "mc_mean"] - 0.2) < 0.02
    assert df.loc[0, "mc_var"] > 0
