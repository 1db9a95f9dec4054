"""Monte-Carlo marginal likelihood of observed preference data.

Strict preferences contribute Heaviside terms (did the sampled utility
order the pair correctly), perceived-equal pairs contribute two-tailed
Gaussian terms on the utility gap.  Both are averaged over one common set
of shape samples so the estimate is a deterministic function of the
hyperparameters for a fixed seed, which is what lets a derivative-free
optimizer work on it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr

from .model import (
    HyperParams,
    SeedLike,
    ShapeSamples,
    joint_utilities,
    shapes_from_draws,
    standard_normal_draws,
)
from .space import MetricSpace, check_point

# Monte-Carlo sample counts: the smaller one keeps refits cheap inside the
# active loop, the larger one is for final reporting.
MC_SAMPLES_FIT = 256
MC_SAMPLES_REPORT = 4096


class PreferencePair(NamedTuple):
    """An ordered strict preference: `worse` lost the comparison to `better`."""

    worse: np.ndarray
    better: np.ndarray


class EquivalencePair(NamedTuple):
    """An unordered pair the respondent judged perceptually equal."""

    a: np.ndarray
    b: np.ndarray


@dataclass
class PreferenceDataset:
    """Append-only collections of strict-preference and equal pairs."""

    space: MetricSpace
    preferences: list[PreferencePair] = field(default_factory=list)
    equivalences: list[EquivalencePair] = field(default_factory=list)

    @property
    def n_preferences(self) -> int:
        return len(self.preferences)

    @property
    def n_equivalences(self) -> int:
        return len(self.equivalences)

    def __len__(self) -> int:
        return self.n_preferences + self.n_equivalences

    def add_preference(self, worse, better) -> None:
        """Record a strict preference of `better` over `worse`.

        Dominance-consistent pairs are accepted (their likelihood factor
        is a constant); the query loop never presents such pairs, but
        externally generated datasets may contain them.
        """
        worse = check_point(worse, self.space)
        better = check_point(better, self.space)
        self.preferences.append(PreferencePair(worse, better))

    def add_equivalence(self, a, b) -> None:
        a = check_point(a, self.space)
        b = check_point(b, self.space)
        if np.array_equal(a, b):
            warnings.warn("degenerate equivalence pair: both points are identical",
                          stacklevel=2)
        self.equivalences.append(EquivalencePair(a, b))

    def packed(self) -> "PackedDataset":
        """Deduplicated endpoint matrix plus index pairs, for the kernels."""
        index: dict[bytes, int] = {}
        points: list[np.ndarray] = []

        def idx(v: np.ndarray) -> int:
            key = v.tobytes()
            if key not in index:
                index[key] = len(points)
                points.append(v)
            return index[key]

        pref = np.array(
            [(idx(p.worse), idx(p.better)) for p in self.preferences], dtype=np.intp
        ).reshape(-1, 2)
        eq = np.array(
            [(idx(p.a), idx(p.b)) for p in self.equivalences], dtype=np.intp
        ).reshape(-1, 2)
        pts = (
            np.stack(points)
            if points
            else np.empty((0, self.space.n_metrics), dtype=np.float64)
        )
        return PackedDataset(points=pts, pref_idx=pref, eq_idx=eq)


@dataclass(frozen=True)
class PackedDataset:
    points: np.ndarray   # (P, N) unique endpoints
    pref_idx: np.ndarray  # (M, 2) columns (worse, better)
    eq_idx: np.ndarray    # (L, 2)


@dataclass(frozen=True)
class LikelihoodEstimate:
    """A Monte-Carlo log marginal likelihood and how it was produced."""

    log_value: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.log_value > 0.0:
            raise ValueError("log likelihood cannot be positive")


def _heaviside_probabilities(diffs: np.ndarray) -> np.ndarray:
    """Laplace-smoothed Monte-Carlo Heaviside estimate per pair.

    diffs is (S, M) of utility differences (better minus worse).  Exact
    zeros count one half.  The smoothing (k+1)/(S+2) keeps every factor
    inside (0, 1) so the log never diverges.
    """
    n_samples = diffs.shape[0]
    k = (diffs > 0.0).sum(axis=0) + 0.5 * (diffs == 0.0).sum(axis=0)
    return (k + 1.0) / (n_samples + 2.0)


def _equivalence_probabilities(diffs: np.ndarray, sigma_e: float) -> np.ndarray:
    """Mean two-tailed probability 2*Phi(-|u_d|/sigma_e) per pair.

    The exact value is strictly positive; the floor only guards against
    float underflow of the normal tail so the log stays finite.
    """
    probs = (2.0 * ndtr(-np.abs(diffs) / sigma_e)).mean(axis=0)
    return np.maximum(probs, np.finfo(np.float64).tiny)


def preference_pair_probability(
    pair: PreferencePair, shapes: ShapeSamples, space: MetricSpace
) -> float:
    """Probability that sampled utilities rank `better` above `worse`."""
    if len(shapes) == 0:
        raise ValueError("at least one shape sample is required")
    U = joint_utilities(np.stack([pair.worse, pair.better]), shapes, space)
    return float(_heaviside_probabilities((U[:, 1] - U[:, 0])[:, None])[0])


def equivalence_pair_probability(
    pair: EquivalencePair, shapes: ShapeSamples, sigma_e: float, space: MetricSpace
) -> float:
    """Probability that the pair's utility gap is perceptually negligible."""
    if len(shapes) == 0:
        raise ValueError("at least one shape sample is required")
    if not sigma_e > 0.0:
        raise ValueError("sigma_e must be strictly positive")
    U = joint_utilities(np.stack([pair.a, pair.b]), shapes, space)
    return float(_equivalence_probabilities((U[:, 1] - U[:, 0])[:, None], sigma_e)[0])


def _log_ml_from_draws(
    theta: HyperParams, z: np.ndarray, packed: PackedDataset, space: MetricSpace
) -> float:
    """Log marginal likelihood given pre-drawn standard normals.

    Per-pair log factors are combined with math.fsum, so the total is
    invariant to the order of pairs in the dataset.
    """
    if packed.pref_idx.shape[0] == 0 and packed.eq_idx.shape[0] == 0:
        return 0.0
    shapes = shapes_from_draws(theta, z)
    U = joint_utilities(packed.points, shapes, space)
    terms: list[float] = []
    if packed.pref_idx.shape[0]:
        diffs = U[:, packed.pref_idx[:, 1]] - U[:, packed.pref_idx[:, 0]]
        terms.extend(np.log(_heaviside_probabilities(diffs)).tolist())
    if packed.eq_idx.shape[0]:
        diffs = U[:, packed.eq_idx[:, 1]] - U[:, packed.eq_idx[:, 0]]
        terms.extend(np.log(_equivalence_probabilities(diffs, theta.sigma_e)).tolist())
    return math.fsum(terms)


def log_marginal_likelihood(
    data: PreferenceDataset,
    theta: HyperParams,
    n_samples: int = MC_SAMPLES_FIT,
    seed: int = 0,
) -> LikelihoodEstimate:
    """Monte-Carlo estimate of log p(preferences | theta) p(equals | theta).

    One common set of `n_samples` shape draws is used for every pair; the
    draws depend only on (n_samples, N, seed), never on theta, so repeated
    evaluation across hyperparameters reuses the same randomness.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if theta.n_metrics != data.space.n_metrics:
        raise ValueError("hyperparameters and dataset disagree on the metric count")
    z = standard_normal_draws(n_samples, theta.n_metrics, seed)
    value = _log_ml_from_draws(theta, z, data.packed(), data.space)
    return LikelihoodEstimate(log_value=value, n_samples=n_samples, seed=int(seed))
