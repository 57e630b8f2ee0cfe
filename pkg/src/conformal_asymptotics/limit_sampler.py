"""Sampling the limiting Gaussian processes of the FCP and BH theory.

The limit laws under shift/weighting are not distribution free, so their
sup-statistics have no closed-form quantiles; this module samples the limit
processes on a grid (Brownian bridges built from cumulative Gaussian
increments, composed with the scenario's theory curves) and estimates
quantiles by Monte Carlo.  One rng stream per path keeps results
reproducible regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DomainError
from .limits import TheoryFunctions
from .rng import SeededRng

__all__ = ["GridPath", "LimitKind", "default_grid", "sample_brownian_bridge",
           "sample_limit_process", "limit_sup_quantile", "SupQuantile"]


@dataclass(frozen=True)
class GridPath:
    """One sampled path: values of a process at strictly increasing grid points."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.size != values.size:
            raise DomainError("grid and values must have equal length")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


class LimitKind(Enum):
    """Which limiting process to sample."""

    SHIFT_FCP = "shift_fcp"
    WEIGHTED_FCP = "weighted_fcp"
    NOVELTY_TRIPLE = "novelty_triple"
    WEIGHTED_NOVELTY_TRIPLE = "weighted_novelty_triple"


def default_grid(size: int = 1024) -> np.ndarray:
    """``size`` equispaced points strictly inside (0, 1)."""
    if size < 1:
        raise DomainError("grid size must be positive")
    return np.arange(1, size + 1, dtype=float) / (size + 1)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("grid must be nonempty")
    if np.any(np.diff(grid) <= 0) or grid[0] <= 0.0 or grid[-1] >= 1.0:
        raise DomainError("grid must be strictly increasing within (0, 1)")
    return grid


def _bridge_at(gen: np.random.Generator, times: np.ndarray) -> np.ndarray:
    """Brownian bridge at strictly increasing times in (0, 1).

    Built as W(t) - t W(1) from independent Gaussian increments over the
    partition {0, times..., 1}, which costs O(len(times)) per path.
    """
    aug = np.concatenate([[0.0], times, [1.0]])
    dt = np.diff(aug)
    w = np.cumsum(gen.standard_normal(dt.size) * np.sqrt(dt))
    return w[:-1] - times * w[-1]


def sample_brownian_bridge(grid, rng: SeededRng) -> GridPath:
    """One standard Brownian bridge path on the grid."""
    grid = _check_grid(grid)
    return GridPath(grid, _bridge_at(rng.generator(), grid))


def _increasing_times(values: np.ndarray, what: str) -> np.ndarray:
    times = np.asarray(values, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ConfigurationError(f"{what} is not increasing on the grid; "
                                 "cannot time-change a bridge with it")
    return np.clip(times, 1e-12, 1.0 - 1e-12)


def _make_sampler(kind: LimitKind, theory: TheoryFunctions, sigma2: float,
                  grid: np.ndarray):
    """Precompute grid curves and return a draw function gen -> path values.

    For the novelty kinds the draw function returns a (z0, z1, z) triple.
    """
    if not 0.0 <= sigma2 <= 1.0:
        raise DomainError("sigma2 must lie in [0, 1]")
    s = math.sqrt(sigma2)
    r = math.sqrt(1.0 - sigma2)

    if kind == LimitKind.SHIFT_FCP:
        g_times = _increasing_times(theory.G(grid), "G")
        gp = np.asarray(theory.G_prime(grid))

        def draw(gen):
            u = _bridge_at(gen, g_times)
            v = _bridge_at(gen, grid)
            return s * u + r * gp * v

        return draw

    if kind == LimitKind.WEIGHTED_FCP:
        gw_times = _increasing_times(theory.Gw(grid), "Gw")
        gwp = np.asarray(theory.Gw_prime(grid))
        iw = np.asarray(theory.Iw(grid))
        iw_times = _increasing_times(iw, "Iw")
        rho = theory.rho_w

        def draw(gen):
            u = _bridge_at(gen, gw_times)
            v = _bridge_at(gen, iw_times)
            n = gen.standard_normal()
            return s * u + r * rho * gwp * (v + (grid - iw) * n)

        return draw

    if theory.pi0 is None or theory.scenario.null_dist is None:
        raise ConfigurationError("novelty limit kinds need a scenario with "
                                 "null_dist and pi0")
    pi0 = theory.pi0

    if kind == LimitKind.NOVELTY_TRIPLE:
        g_times = _increasing_times(theory.G(grid), "G")
        gp = np.asarray(theory.G_prime(grid))

        def draw(gen):
            u = _bridge_at(gen, grid)
            v = _bridge_at(gen, g_times)
            w = _bridge_at(gen, grid)
            z0 = (s / math.sqrt(pi0)) * u + r * w
            z1 = (s / math.sqrt(1.0 - pi0)) * v + gp * r * w
            return z0, z1, pi0 * z0 + (1.0 - pi0) * z1

        return draw

    if kind == LimitKind.WEIGHTED_NOVELTY_TRIPLE:
        g0w_times = _increasing_times(theory.G0w(grid), "G0w")
        gw_times = _increasing_times(theory.Gw(grid), "Gw")
        g0wp = np.asarray(theory.G0w_prime(grid))
        gwp = np.asarray(theory.Gw_prime(grid))
        iw = np.asarray(theory.Iw(grid))
        iw_times = _increasing_times(iw, "Iw")
        rho = theory.rho_w

        def draw(gen):
            u = _bridge_at(gen, g0w_times)
            v = _bridge_at(gen, gw_times)
            w = _bridge_at(gen, iw_times)
            n = gen.standard_normal()
            q = w + (grid - iw) * n
            z0 = (s / math.sqrt(pi0)) * u + g0wp * rho * r * q
            z1 = (s / math.sqrt(1.0 - pi0)) * v + gwp * rho * r * q
            return z0, z1, pi0 * z0 + (1.0 - pi0) * z1

        return draw

    raise ConfigurationError(f"unknown limit kind: {kind!r}")


def sample_limit_process(kind: LimitKind, theory: TheoryFunctions,
                         sigma2: float, grid, rng: SeededRng):
    """One path of the chosen limiting process on the grid.

    Returns a GridPath, or a triple (z0, z1, z) of GridPaths for the novelty
    kinds (null process, alternative process, and their pi0-mixture).
    """
    grid = _check_grid(grid)
    draw = _make_sampler(kind, theory, sigma2, grid)
    out = draw(rng.generator())
    if isinstance(out, tuple):
        return tuple(GridPath(grid, v) for v in out)
    return GridPath(grid, out)


@dataclass(frozen=True)
class SupQuantile:
    """Monte Carlo estimate of a limit sup-statistic quantile."""

    kind: str
    delta: float
    reps: int
    grid_size: int
    quantile: float
    bootstrap_se: float
    master_seed: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "delta": self.delta, "reps": self.reps,
                "grid_size": self.grid_size, "quantile": self.quantile,
                "bootstrap_se": self.bootstrap_se, "seed": self.master_seed}


def limit_sup_quantile(kind: LimitKind, theory: TheoryFunctions,
                       sigma2: float, delta: float, reps: int,
                       grid_size: int, rng: SeededRng) -> SupQuantile:
    """Empirical (1-delta)-quantile of sup|path| over the grid.

    Path i draws from stream ``rng.stream_index + i``; the bootstrap SE uses
    200 resamples from a dedicated stream after the path streams.  For the
    novelty kinds the sup is taken over the mixture process.
    """
    if reps < 100:
        raise DomainError("need at least 100 replications")
    if grid_size < 64:
        raise DomainError("grid must have at least 64 points")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    grid = default_grid(grid_size)
    draw = _make_sampler(kind, theory, sigma2, grid)
    sups = np.empty(reps)
    for i in range(reps):
        gen = SeededRng(rng.master_seed, rng.stream_index + i).generator()
        out = draw(gen)
        values = out[2] if isinstance(out, tuple) else out
        sups[i] = np.max(np.abs(values))
    q = float(np.quantile(sups, 1.0 - delta))
    boot_gen = SeededRng(rng.master_seed, rng.stream_index + reps).generator()
    idx = boot_gen.integers(0, reps, size=(200, reps))
    boot = np.quantile(sups[idx], 1.0 - delta, axis=1)
    se = float(np.std(boot, ddof=1))
    return SupQuantile(kind=kind.value, delta=delta, reps=reps,
                       grid_size=grid_size, quantile=q, bootstrap_se=se,
                       master_seed=rng.master_seed)
