"""Step-function calculus for conformal p-values.

Empirical cdfs, the stair-shaped reference function with steps at k/(n+1),
exact sup-deviations between step functions, the Benjamini-Hochberg step-up
procedure (computed two ways and cross-checked), and false/true discovery
proportion accounting.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["StepFunction", "LabeledPValues", "BhOutcome", "ecdf",
           "reference_In", "sup_deviation", "bh_reject", "fdp_tdp",
           "step_function_to_csv", "step_function_from_csv"]


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function on [0, 1].

    ``values[i]`` is the level on [jumps[i], jumps[i+1]) and
    ``value_before_first`` the level on [0, jumps[0]).
    """

    jumps: np.ndarray
    values: np.ndarray
    value_before_first: float = 0.0

    def __post_init__(self):
        jumps = np.asarray(self.jumps, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if jumps.size != values.size:
            raise DomainError("jumps and values must have equal length")
        if jumps.size and (np.any(np.diff(jumps) <= 0)
                           or jumps[0] < 0.0 or jumps[-1] > 1.0):
            raise DomainError("jumps must be strictly increasing within [0, 1]")
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        """Level of the last jump <= t (right-continuous evaluation)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jumps, t, side="right")
        levels = np.concatenate([[self.value_before_first], self.values])
        out = levels[idx]
        return float(out) if t.ndim == 0 else out

    def left_limit(self, t):
        """Level just before t, i.e. of the last jump strictly below t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jumps, t, side="left")
        levels = np.concatenate([[self.value_before_first], self.values])
        out = levels[idx]
        return float(out) if t.ndim == 0 else out


@dataclass(frozen=True)
class LabeledPValues:
    """P-values together with ground-truth null indicators."""

    values: np.ndarray
    is_null: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        is_null = np.asarray(self.is_null, dtype=bool).ravel()
        if values.size != is_null.size:
            raise DomainError("values and is_null must have equal length")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "is_null", is_null)

    @property
    def m0(self) -> int:
        return int(self.is_null.sum())

    @property
    def pi0(self) -> float:
        return self.m0 / self.values.size if self.values.size else 0.0


@dataclass(frozen=True)
class BhOutcome:
    """Result of the step-up procedure at a given level."""

    rejected: np.ndarray  # indices into the input p-value vector
    threshold: float      # largest rejected p-value, 0.0 if none
    k_hat: int

    def to_json(self) -> dict:
        return {"rejected": [int(i) for i in self.rejected],
                "threshold": self.threshold, "k_hat": self.k_hat}


def ecdf(values) -> StepFunction:
    """Empirical cdf as a step function; duplicate points merge their mass."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        warnings.warn("ecdf of an empty sample is the constant 0", stacklevel=2)
        return StepFunction(np.empty(0), np.empty(0), 0.0)
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise DomainError("ecdf input must lie in [0, 1]")
    points, counts = np.unique(values, return_counts=True)
    levels = np.cumsum(counts) / values.size
    return StepFunction(points, levels, 0.0)


def reference_In(n: int) -> StepFunction:
    """The stair function alpha -> floor((n+1) alpha) / (n+1)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    k = np.arange(1, n + 2, dtype=float)
    return StepFunction(k / (n + 1), k / (n + 1), 0.0)


def sup_deviation(f: StepFunction, g: StepFunction) -> float:
    """Exact sup over [0, 1] of |f - g|.

    The difference of two step functions is a step function whose supremum
    is attained at a one-sided limit of some jump point (or at 0), so it
    suffices to evaluate both sides and both limits at the union of jumps.
    """
    points = np.union1d(f.jumps, g.jumps)
    best = abs(f.value_before_first - g.value_before_first)
    if points.size:
        right = np.max(np.abs(f(points) - g(points)))
        left = np.max(np.abs(f.left_limit(points) - g.left_limit(points)))
        best = max(best, float(right), float(left))
    return best


def _bh_threshold_functional(pvalues: np.ndarray, alpha: float) -> float:
    """sup{t in [0,1] : ecdf(p)(t) >= t/alpha}, computed segment by segment."""
    if pvalues.size == 0:
        return 0.0
    fhat = ecdf(pvalues)
    # on [jump_j, next_jump) the ecdf is constant at level_j, so the
    # condition holds up to min(alpha * level_j, segment end); t = 0 always
    # qualifies, hence the 0.0 floor
    seg_ends = np.concatenate([fhat.jumps[1:], [1.0]])
    cand = np.minimum(alpha * fhat.values, seg_ends)
    valid = cand >= fhat.jumps
    sup = float(cand[valid].max()) if np.any(valid) else 0.0
    return min(sup, 1.0)


def bh_reject(pvalues, alpha: float) -> BhOutcome:
    """Step-up procedure: reject the k_hat smallest p-values.

    k_hat = max{k : p_(k) <= alpha k / m}.  The same rejection set is also
    derived from the threshold functional sup{t : ecdf(t) >= t/alpha} and the
    two are asserted to agree.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    pvalues = np.asarray(pvalues, dtype=float).ravel()
    m = pvalues.size
    if m == 0:
        return BhOutcome(np.empty(0, dtype=int), 0.0, 0)
    if np.any(pvalues < 0.0) or np.any(pvalues > 1.0):
        raise DomainError("p-values must lie in [0, 1]")
    p_sorted = np.sort(pvalues)
    ok = np.nonzero(p_sorted <= alpha * np.arange(1, m + 1) / m)[0]
    k_hat = int(ok[-1] + 1) if ok.size else 0
    cutoff = alpha * k_hat / m
    rejected = np.nonzero(pvalues <= cutoff)[0] if k_hat else np.empty(0, dtype=int)

    dual_cutoff = _bh_threshold_functional(pvalues, alpha)
    dual = np.nonzero(pvalues <= dual_cutoff)[0]
    assert np.array_equal(rejected, dual), \
        "step-up and threshold-functional rejection sets disagree"

    threshold = float(p_sorted[k_hat - 1]) if k_hat else 0.0
    return BhOutcome(rejected, threshold, k_hat)


def fdp_tdp(outcome: BhOutcome, labels: LabeledPValues) -> tuple[float, float]:
    """False and true discovery proportions of a rejection set.

    fdp = |rejected & nulls| / max(|rejected|, 1);
    tdp = |rejected & alternatives| / max(|alternatives|, 1).
    """
    if outcome.rejected.size and outcome.rejected.max() >= labels.values.size:
        raise DomainError("rejected indices exceed the labeled p-value vector")
    rejected_null = labels.is_null[outcome.rejected]
    n_rej = outcome.rejected.size
    n_alt = int((~labels.is_null).sum())
    fdp = float(rejected_null.sum()) / max(n_rej, 1)
    tdp = float((~rejected_null).sum()) / max(n_alt, 1)
    return fdp, tdp


def step_function_to_csv(f: StepFunction) -> str:
    """Serialize in jump representation: header ``t,value``, first row at t=0."""
    buf = io.StringIO()
    buf.write("t,value\n")
    buf.write(f"0,{float(f.value_before_first)!r}\n")
    for t, v in zip(f.jumps, f.values):
        buf.write(f"{float(t)!r},{float(v)!r}\n")
    return buf.getvalue()


def step_function_from_csv(text: str) -> StepFunction:
    """Inverse of :func:`step_function_to_csv`."""
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    t = np.array([float(r[0]) for r in rows])
    v = np.array([float(r[1]) for r in rows])
    if t.size == 0 or t[0] != 0.0:
        raise DomainError("step function CSV must start with a t=0 row")
    return StepFunction(t[1:], v[1:], float(v[0]))
