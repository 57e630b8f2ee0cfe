"""Command-line interface.

Data goes to stdout (or files given by flags), logs go to stderr.  Exit
codes: 0 success, 2 input/validation error, 3 assumption violation (for
example a subcritical BH level), 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import pandas as pd

from .conformal import conformal_pvalues, weighted_conformal_pvalues
from .empirical import bh_reject
from .errors import AssumptionViolationError, ConformalError
from .limits import (AsymptoticRegime, ScenarioSpec, fcp_pointwise_ci,
                     fcp_uniform_band, fdp_tdp_asymptotics, tau,
                     theory_functions)
from .simulate import (SCHEMA_VERSION, ExperimentConfig, reproduce_fig1,
                       reproduce_fig2, run_experiment, write_result)
from .weights import weight_from_json

__all__ = ["main"]

DEFAULT_SEED = 20240  # fixed so unattended runs are reproducible

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ASSUMPTION = 3
EXIT_INTERNAL = 4


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _read_scores(path: str) -> np.ndarray:
    frame = pd.read_csv(path)
    if "score" not in frame.columns:
        raise ConformalError(f"{path}: expected a CSV with a 'score' column")
    return frame["score"].to_numpy(dtype=float)


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(frame: pd.DataFrame, path: str | None) -> None:
    if path:
        frame.to_csv(path, index=False)
    else:
        frame.to_csv(sys.stdout, index=False)


def _cmd_pvalues(args) -> int:
    cal = _read_scores(args.cal)
    test = _read_scores(args.test)
    if args.weight:
        weight = weight_from_json(_read_json(args.weight))
        pvalues = weighted_conformal_pvalues(cal, test, weight)
        _log(f"n={cal.size} m={test.size} weight={weight.kind} "
             f"w_inf={weight.w_inf:g}")
    else:
        pvalues = conformal_pvalues(cal, test)
        _log(f"n={cal.size} m={test.size} weight=none")
    frame = pd.DataFrame({"index": np.arange(test.size), "p_value": pvalues})
    _emit_csv(frame, args.out)
    return EXIT_OK


def _cmd_band(args) -> int:
    asym, dkw = fcp_uniform_band(args.n, args.m, args.delta)
    regime = AsymptoticRegime(args.n, args.m)
    _emit_json({"schema_version": SCHEMA_VERSION, "n": args.n, "m": args.m,
                "delta": args.delta, "tau": regime.tau,
                "sigma2": regime.sigma2, "asymptotic_halfwidth": asym,
                "dkw_halfwidth": dkw}, args.out)
    return EXIT_OK


def _cmd_ci(args) -> int:
    scenario = ScenarioSpec.from_json(_read_json(args.scenario))
    theory = theory_functions(scenario)
    regime = AsymptoticRegime(args.n, args.m)
    mean, lo, hi = fcp_pointwise_ci(args.alpha, args.level, regime, theory)
    _emit_json({"schema_version": SCHEMA_VERSION, "alpha": args.alpha,
                "level": args.level, "n": args.n, "m": args.m,
                "scenario": scenario.to_json(), "mean": mean,
                "lo": lo, "hi": hi}, args.out)
    return EXIT_OK


def _cmd_bh(args) -> int:
    frame = pd.read_csv(args.pvalues)
    if "p_value" not in frame.columns:
        raise ConformalError(f"{args.pvalues}: expected a 'p_value' column")
    outcome = bh_reject(frame["p_value"].to_numpy(dtype=float), args.alpha)
    payload = {"schema_version": SCHEMA_VERSION, "alpha": args.alpha}
    payload.update(outcome.to_json())
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_theory_dump(args) -> int:
    scenario = ScenarioSpec.from_json(_read_json(args.scenario))
    theory = theory_functions(scenario)
    ts = np.arange(1, args.grid_size + 1, dtype=float) / (args.grid_size + 1)
    columns = {"t": ts, "G": theory.G(ts), "G_prime": theory.G_prime(ts),
               "Gw": theory.Gw(ts), "Gw_prime": theory.Gw_prime(ts),
               "Iw": theory.Iw(ts), "Fw_cal": theory.Fw_cal(ts),
               "Vw_cal": theory.Vw_cal(ts)}
    if scenario.null_dist is not None:
        columns["G0"] = theory.G0(ts)
        columns["G0w"] = theory.G0w(ts)
        columns["Gmixt"] = theory.Gmixt(ts)
        columns["Gmixtw"] = theory.Gmixtw(ts)
    _log(f"rho_w={theory.rho_w:.12g} method={theory.method}")
    _emit_csv(pd.DataFrame(columns), args.out)
    return EXIT_OK


def _cmd_theory_moments(args) -> int:
    scenario = ScenarioSpec.from_json(_read_json(args.scenario))
    theory = theory_functions(scenario)
    regime = AsymptoticRegime(args.n, args.m)
    moments = fdp_tdp_asymptotics(args.alpha, regime, theory, args.mode)
    _emit_json({"schema_version": SCHEMA_VERSION, "alpha": args.alpha,
                "n": args.n, "m": args.m, "mode": args.mode,
                "scenario": scenario.to_json(), **moments}, args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = ExperimentConfig.from_json(_read_json(args.config))
    result = run_experiment(cfg, workers=args.workers)
    write_result(result, args.out)
    _log(f"mode={cfg.mode} reps={cfg.reps} -> {args.out}/records.csv "
         f"+ summary.json")
    print(f"wrote {len(result.records)} records to {args.out}")
    return EXIT_OK


def _cmd_fig1(args) -> int:
    table = reproduce_fig1(args.n, args.m, args.deltas, args.reps,
                           args.seed, workers=args.workers)
    _emit_csv(table, args.out)
    return EXIT_OK


def _cmd_fig2(args) -> int:
    grid = np.linspace(args.delta_min, args.delta_max, args.delta_points)
    table = reproduce_fig2(grid, args.alpha, args.level, args.n, args.m,
                           mc_reps=args.mc_reps, seed=args.seed,
                           workers=args.workers)
    _emit_csv(table, args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confasym",
        description="Conformal p-values and their asymptotic calculus")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pvalues", help="(weighted) conformal p-values")
    p.add_argument("--cal", required=True, help="calibration scores CSV")
    p.add_argument("--test", required=True, help="test scores CSV")
    p.add_argument("--weight", help="weight function JSON")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=_cmd_pvalues)

    p = sub.add_parser("band", help="uniform FCP band half-widths")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_band)

    p = sub.add_parser("ci", help="pointwise FCP confidence interval")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ci)

    p = sub.add_parser("bh", help="step-up rejection at level alpha")
    p.add_argument("--pvalues", required=True, help="CSV with p_value column")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bh)

    p = sub.add_parser("theory", help="limit curves and moments")
    theory_sub = p.add_subparsers(dest="theory_command", required=True)
    d = theory_sub.add_parser("dump", help="CSV grid of the limit curves")
    d.add_argument("--scenario", required=True)
    d.add_argument("--grid-size", type=int, default=99)
    d.add_argument("--out")
    d.set_defaults(func=_cmd_theory_dump)
    mo = theory_sub.add_parser("moments", help="asymptotic FDP/TDP moments")
    mo.add_argument("--scenario", required=True)
    mo.add_argument("--alpha", type=float, required=True)
    mo.add_argument("--n", type=int, required=True)
    mo.add_argument("--m", type=int, required=True)
    mo.add_argument("--mode", default="unweighted",
                    choices=["unweighted", "oracle_weighted",
                             "general_weighted"])
    mo.add_argument("--out")
    mo.set_defaults(func=_cmd_theory_moments)

    p = sub.add_parser("simulate", help="run a config-driven experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fig1", help="sup-statistic quantile comparison table")
    p.add_argument("--n", type=int, nargs="+", default=[500])
    p.add_argument("--m", type=int, nargs="+", default=[100, 300, 1000])
    p.add_argument("--deltas", type=float, nargs="+", default=[0.05, 0.2])
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fig1)

    p = sub.add_parser("fig2", help="weighted FCP mean/CI vs weight mistuning")
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--level", type=float, default=0.8)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--delta-min", type=float, default=-0.5)
    p.add_argument("--delta-max", type=float, default=0.5)
    p.add_argument("--delta-points", type=int, default=21)
    p.add_argument("--mc-reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fig2)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches our input-error code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except AssumptionViolationError as exc:
        _log(f"assumption violation: {exc}")
        return EXIT_ASSUMPTION
    except (ConformalError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        _log(f"input error: {exc}")
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        _log(f"internal error: {exc!r}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
