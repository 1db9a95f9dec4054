"""Simulated-oracle benchmark: test utilities, Kendall tau, harness.

Each test utility plays the role of a respondent with a known scalar
utility.  A full session runs against it, and the learned model is scored
by the tie-corrected Kendall rank correlation between model scores and
true scores on a fixed 10,000-point hold-out.  Points violating a test's
threshold constraints score a sentinel rank floor (tied among
themselves), matching the oracle's equal-when-both-infeasible rule.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from numba import njit

from .acquisition import PolicyKind, QueryPair, QueryPolicy
from .fitting import FitConfig
from .model import HyperParams, joint_utilities, sample_shapes
from .session import OracleResponse, PreferenceSession
from .space import Direction, MetricSpace

DEFAULT_HOLDOUT_SIZE = 10_000
DEFAULT_RUNS = 5
EVAL_SHAPE_SAMPLES = 1024


# -- Kendall rank correlation ---------------------------------------------


@njit(cache=True)
def _merge_count_inversions(values: np.ndarray) -> int:
    """Strict inversions of `values` by bottom-up mergesort (in place)."""
    n = values.shape[0]
    buf = np.empty(n, dtype=values.dtype)
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if values[j] < values[i]:
                    inversions += mid - i
                    buf[k] = values[j]
                    j += 1
                else:
                    buf[k] = values[i]
                    i += 1
                k += 1
            while i < mid:
                buf[k] = values[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = values[j]
                j += 1
                k += 1
            values[lo:hi] = buf[lo:hi]
        width *= 2
    return inversions


def _tie_pair_count(sorted_values: np.ndarray) -> int:
    """Sum of t*(t-1)/2 over runs of equal values in a sorted array.

    Runs are found by equality, not differencing, so infinite sentinel
    values tie correctly.
    """
    boundaries = np.flatnonzero(sorted_values[1:] != sorted_values[:-1])
    run_lengths = np.diff(np.concatenate(([0], boundaries + 1, [len(sorted_values)])))
    return int((run_lengths * (run_lengths - 1) // 2).sum())


def kendall_tau(x, y, variant: str = "b") -> float:
    """Kendall rank correlation in O(n log n) (Knight's algorithm).

    variant "b" (default) corrects the denominator for ties in either
    argument; variant "a" divides by the total pair count.  Raises on
    length mismatch and on all-constant input, where the coefficient is
    undefined.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    n = x.shape[0]
    if n < 2:
        raise ValueError("kendall_tau needs at least two observations")
    if np.isnan(x).any() or np.isnan(y).any():
        raise ValueError("kendall_tau inputs must not contain NaN")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValueError("kendall_tau is undefined for an all-constant argument")
    if variant not in ("a", "b"):
        raise ValueError(f"unknown variant {variant!r}")

    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    n0 = n * (n - 1) // 2
    ties_x = _tie_pair_count(xs)
    joint = np.flatnonzero((xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1]))
    run_lengths = np.diff(np.concatenate(([0], joint + 1, [n])))
    ties_xy = int((run_lengths * (run_lengths - 1) // 2).sum())
    ties_y = _tie_pair_count(np.sort(ys, kind="stable"))
    swaps = _merge_count_inversions(ys.copy())

    concordant_minus_discordant = n0 - ties_x - ties_y + ties_xy - 2 * swaps
    if variant == "a":
        return concordant_minus_discordant / n0
    denom = np.sqrt(float(n0 - ties_x) * float(n0 - ties_y))
    return float(concordant_minus_discordant / denom)


# -- test utilities ---------------------------------------------------------


class Constraint(NamedTuple):
    """A feasibility threshold on one metric: value must be on `side` of bound."""

    metric: int
    bound: float
    side: str  # ">" or "<"

    def satisfied(self, X: np.ndarray) -> np.ndarray:
        if self.side == ">":
            return X[:, self.metric] > self.bound
        if self.side == "<":
            return X[:, self.metric] < self.bound
        raise ValueError(f"unknown constraint side {self.side!r}")


@dataclass(frozen=True)
class TestUtility:
    """A known scalar utility standing in for a human respondent."""

    name: str
    pretty: str
    directions: tuple[Direction, ...]
    raw: Callable[[np.ndarray], np.ndarray]
    minimize_objective: bool = False
    constraints: tuple[Constraint, ...] = ()

    @property
    def n_metrics(self) -> int:
        return len(self.directions)

    def space(self) -> MetricSpace:
        return MetricSpace(self.directions)

    def feasible(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        ok = np.ones(X.shape[0], dtype=bool)
        for c in self.constraints:
            ok &= c.satisfied(X)
        return ok

    def oriented_scores(self, X) -> np.ndarray:
        """Higher-is-better scores; infeasible points score -inf, a rank
        floor tied among themselves."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        values = np.asarray(self.raw(X), dtype=np.float64)
        if self.minimize_objective:
            values = -values
        return np.where(self.feasible(X), values, -np.inf)


def simulated_oracle(test: TestUtility, pair: QueryPair) -> OracleResponse:
    """Answer one comparison the way the test utility would.

    Pairs where both endpoints violate a constraint are reported equal;
    otherwise the higher oriented score wins, with exact ties equal.
    """
    scores = test.oriented_scores(np.stack([pair.a, pair.b]))
    if scores[0] == scores[1]:
        return OracleResponse.EQUAL
    return OracleResponse.A if scores[0] > scores[1] else OracleResponse.B


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


MAX, MIN = Direction.MAXIMIZE, Direction.MINIMIZE

TABLE1: dict[str, TestUtility] = {
    t.name: t
    for t in [
        TestUtility(
            name="max_f1_plus_2f2",
            pretty="max f1 + 2 f2",
            directions=(MAX, MAX),
            raw=lambda X: X[:, 0] + 2.0 * X[:, 1],
        ),
        TestUtility(
            name="max_f1_plus_10f2",
            pretty="max f1 + 10 f2",
            directions=(MAX, MAX),
            raw=lambda X: X[:, 0] + 10.0 * X[:, 1],
        ),
        TestUtility(
            name="min_f1_st_f2_gt_06",
            pretty="min f1 s.t. f2 > 0.6",
            directions=(MIN, MAX),
            raw=lambda X: X[:, 0],
            minimize_objective=True,
            constraints=(Constraint(1, 0.6, ">"),),
        ),
        TestUtility(
            name="max_f1_score",
            pretty="max 2 f1 f2 / (f1 + f2)",
            directions=(MAX, MAX),
            raw=lambda X: _safe_ratio(2.0 * X[:, 0] * X[:, 1], X[:, 0] + X[:, 1]),
        ),
        TestUtility(
            name="max_f2_score",
            pretty="max 5 f1 f2 / (4 f1 + f2)",
            directions=(MAX, MAX),
            raw=lambda X: _safe_ratio(5.0 * X[:, 0] * X[:, 1], 4.0 * X[:, 0] + X[:, 1]),
        ),
        TestUtility(
            name="max_f1_plus_2f2_plus_f3",
            pretty="max f1 + 2 f2 + f3",
            directions=(MAX, MAX, MAX),
            raw=lambda X: X[:, 0] + 2.0 * X[:, 1] + X[:, 2],
        ),
        TestUtility(
            name="max_5f1_plus_2f2_plus_f3",
            pretty="max 5 f1 + 2 f2 + f3",
            directions=(MAX, MAX, MAX),
            raw=lambda X: 5.0 * X[:, 0] + 2.0 * X[:, 1] + X[:, 2],
        ),
        TestUtility(
            name="min_f1_st_f2_gt_06_f3_lt_02",
            pretty="min f1 s.t. f2 > 0.6, f3 < 0.2",
            directions=(MIN, MAX, MIN),
            raw=lambda X: X[:, 0],
            minimize_objective=True,
            constraints=(Constraint(1, 0.6, ">"), Constraint(2, 0.2, "<")),
        ),
        TestUtility(
            name="max_f1_score_st_f3_gt_095",
            pretty="max 2 f1 f2 / (f1 + f2) s.t. f3 > 0.95",
            directions=(MAX, MAX, MAX),
            raw=lambda X: _safe_ratio(2.0 * X[:, 0] * X[:, 1], X[:, 0] + X[:, 1]),
            constraints=(Constraint(2, 0.95, ">"),),
        ),
    ]
}


def table1_suite() -> list[TestUtility]:
    return list(TABLE1.values())


# -- evaluation -------------------------------------------------------------


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def holdout_points(
    test: TestUtility, base_seed: int = 0, size: int = DEFAULT_HOLDOUT_SIZE
) -> np.ndarray:
    """The fixed per-utility hold-out set, reproducible from (name, seed)."""
    ss = np.random.SeedSequence([int(base_seed), _name_key(test.name), 101])
    return np.random.default_rng(ss).uniform(0.0, 1.0, size=(size, test.n_metrics))


def evaluate_model(
    theta: HyperParams,
    test: TestUtility,
    holdout: np.ndarray,
    n_shape_samples: int = EVAL_SHAPE_SAMPLES,
    seed: int = 0,
) -> float:
    """Kendall tau between learned and true utility orderings on a hold-out.

    Each hold-out point is scored by the mean joint utility over shape
    samples drawn from theta (the posterior-mean utility), the test by its
    oriented scores with the infeasible sentinel.
    """
    holdout = np.atleast_2d(np.asarray(holdout, dtype=np.float64))
    if holdout.shape[0] == 0:
        raise ValueError("holdout must be nonempty")
    shapes = sample_shapes(theta, n_shape_samples, seed)
    model_scores = joint_utilities(holdout, shapes, test.space()).mean(axis=0)
    true_scores = test.oriented_scores(holdout)
    return kendall_tau(model_scores, true_scores)


# -- benchmark harness ------------------------------------------------------


@dataclass(frozen=True)
class BenchResult:
    """Aggregated outcome of one (utility, policy) benchmark cell."""

    utility: str
    policy: str
    taus: tuple[float, ...]
    mean_tau: float
    seeds: tuple[int, ...]
    wall_ms: tuple[float, ...]


def session_budget(n_metrics: int, budget_mode: str = "inclusive") -> int:
    """Total query budget.

    "inclusive": the 5N initialization queries count toward the 10N total.
    "additive": 10N model-driven queries on top of the 5N initialization.
    """
    if budget_mode == "inclusive":
        return 10 * n_metrics
    if budget_mode == "additive":
        return 15 * n_metrics
    raise ValueError(f"unknown budget mode {budget_mode!r}")


def _cell_seed(base_seed: int, utility: str, policy: PolicyKind, run: int) -> int:
    ss = np.random.SeedSequence(
        [int(base_seed), _name_key(utility), _name_key(policy.value), int(run)]
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_single_cell(
    test: TestUtility,
    policy_kind: PolicyKind,
    run: int,
    base_seed: int = 0,
    budget_mode: str = "inclusive",
    holdout_size: int = DEFAULT_HOLDOUT_SIZE,
    fit_config: Optional[FitConfig] = None,
) -> tuple[float, int, float]:
    """One full session against the simulated oracle; returns (tau, seed, wall_ms)."""
    seed = _cell_seed(base_seed, test.name, policy_kind, run)
    t0 = time.perf_counter()
    session = PreferenceSession(
        space=test.space(),
        policy=QueryPolicy(kind=policy_kind),
        budget=session_budget(test.n_metrics, budget_mode),
        fit_config=fit_config,
        seed=seed,
    )
    session.run_to_completion(lambda pair: simulated_oracle(test, pair))
    holdout = holdout_points(test, base_seed, holdout_size)
    eval_seed = int(
        np.random.SeedSequence([int(base_seed), _name_key(test.name), 202]).generate_state(
            1, dtype=np.uint64
        )[0]
    )
    tau = evaluate_model(session.theta_mle, test, holdout, seed=eval_seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return tau, seed, wall_ms


def run_benchmark(
    suite: Sequence[TestUtility],
    policies: Sequence[Union[PolicyKind, str]],
    runs: int = DEFAULT_RUNS,
    base_seed: int = 0,
    budget_mode: str = "inclusive",
    holdout_size: int = DEFAULT_HOLDOUT_SIZE,
    n_jobs: int = 1,
    on_result: Optional[Callable[[str, str, int, float, float], None]] = None,
) -> list[BenchResult]:
    """Run every (utility, policy, run) cell and aggregate per-cell means.

    Cells are independent and seed-derived, so any n_jobs yields identical
    numbers; results keep suite order, not completion order.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    policies = [PolicyKind(p) for p in policies]
    cells = [
        (test, kind, run) for test in suite for kind in policies for run in range(runs)
    ]
    outputs = Parallel(n_jobs=n_jobs, return_as="generator")(
        delayed(run_single_cell)(
            test, kind, run, base_seed, budget_mode, holdout_size
        )
        for test, kind, run in cells
    )
    by_cell: dict[tuple[str, str], list[tuple[float, int, float]]] = {}
    for (test, kind, run), (tau, seed, wall_ms) in zip(cells, outputs):
        by_cell.setdefault((test.name, kind.value), []).append((tau, seed, wall_ms))
        if on_result is not None:
            on_result(test.name, kind.value, run, tau, wall_ms)
    results = []
    for test in suite:
        for kind in policies:
            rows = by_cell[(test.name, kind.value)]
            taus = tuple(r[0] for r in rows)
            results.append(
                BenchResult(
                    utility=test.name,
                    policy=kind.value,
                    taus=taus,
                    mean_tau=float(np.mean(taus)),
                    seeds=tuple(r[1] for r in rows),
                    wall_ms=tuple(r[2] for r in rows),
                )
            )
    return results


CSV_HEADER = "utility,policy,run,seed,tau,wall_ms"


def results_to_csv(results: Sequence[BenchResult]) -> str:
    lines = [CSV_HEADER]
    for res in results:
        for run, (tau, seed, wall) in enumerate(zip(res.taus, res.seeds, res.wall_ms)):
            lines.append(f"{res.utility},{res.policy},{run},{seed},{tau:.6f},{wall:.1f}")
    return "\n".join(lines) + "\n"
