"""Generative utility model: products of beta-CDF individual utilities.

A utility function is parameterized by per-metric beta shape pairs
(alpha_i, beta_i).  Shapes are drawn from log-normal priors whose
locations and scales, together with the perceptual-equivalence scale
sigma_e, form the hyperparameter vector fitted from preference data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .space import Direction, MetricSpace, check_point
from .special import betainc, joint_utility_kernel, utility_curve_kernel

# Sampled shape parameters are clamped to this range: log-normal tails can
# otherwise produce shapes outside the evaluator's stable regime, and
# clamping preserves monotonicity.
SHAPE_CLAMP = (1e-3, 1e3)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class HyperParams:
    """The 4N+1 hyperparameters of the utility model.

    mu_* and sigma_* are the location and scale (standard deviation) of
    the log of the corresponding shape parameter; sigma_e is the standard
    deviation of the perceptual equivalence margin.
    """

    mu_alpha: np.ndarray
    sigma_alpha: np.ndarray
    mu_beta: np.ndarray
    sigma_beta: np.ndarray
    sigma_e: float

    def __post_init__(self):
        for name in ("mu_alpha", "sigma_alpha", "mu_beta", "sigma_beta"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=np.float64)))
        n = self.mu_alpha.shape[0]
        for name in ("sigma_alpha", "mu_beta", "sigma_beta"):
            if getattr(self, name).shape != (n,):
                raise ValueError("hyperparameter arrays must share one length per metric")
        if np.any(self.sigma_alpha <= 0.0) or np.any(self.sigma_beta <= 0.0):
            raise ValueError("sigma_alpha and sigma_beta must be strictly positive")
        if not self.sigma_e > 0.0:
            raise ValueError("sigma_e must be strictly positive")
        object.__setattr__(self, "sigma_e", float(self.sigma_e))

    @property
    def n_metrics(self) -> int:
        return self.mu_alpha.shape[0]

    def to_vector(self) -> np.ndarray:
        """Pack as [mu_a1, sg_a1, mu_b1, sg_b1, mu_a2, ..., sigma_e]."""
        n = self.n_metrics
        vec = np.empty(4 * n + 1)
        vec[0 : 4 * n : 4] = self.mu_alpha
        vec[1 : 4 * n : 4] = self.sigma_alpha
        vec[2 : 4 * n : 4] = self.mu_beta
        vec[3 : 4 * n : 4] = self.sigma_beta
        vec[-1] = self.sigma_e
        return vec

    @classmethod
    def from_vector(cls, vec: np.ndarray, n_metrics: int) -> "HyperParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (4 * n_metrics + 1,):
            raise ValueError(f"expected {4 * n_metrics + 1} values, got {vec.shape}")
        return cls(
            mu_alpha=vec[0 : 4 * n_metrics : 4].copy(),
            sigma_alpha=vec[1 : 4 * n_metrics : 4].copy(),
            mu_beta=vec[2 : 4 * n_metrics : 4].copy(),
            sigma_beta=vec[3 : 4 * n_metrics : 4].copy(),
            sigma_e=float(vec[-1]),
        )

    def to_dict(self) -> dict:
        return {
            "mu_alpha": self.mu_alpha.tolist(),
            "sigma_alpha": self.sigma_alpha.tolist(),
            "mu_beta": self.mu_beta.tolist(),
            "sigma_beta": self.sigma_beta.tolist(),
            "sigma_e": self.sigma_e,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HyperParams":
        return cls(
            mu_alpha=np.asarray(d["mu_alpha"], dtype=np.float64),
            sigma_alpha=np.asarray(d["sigma_alpha"], dtype=np.float64),
            mu_beta=np.asarray(d["mu_beta"], dtype=np.float64),
            sigma_beta=np.asarray(d["sigma_beta"], dtype=np.float64),
            sigma_e=float(d["sigma_e"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, HyperParams):
            return NotImplemented
        return (
            np.array_equal(self.mu_alpha, other.mu_alpha)
            and np.array_equal(self.sigma_alpha, other.sigma_alpha)
            and np.array_equal(self.mu_beta, other.mu_beta)
            and np.array_equal(self.sigma_beta, other.sigma_beta)
            and self.sigma_e == other.sigma_e
        )


@dataclass(frozen=True)
class ShapeSample:
    """One draw of the per-metric beta shape parameters."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=np.float64)))
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=np.float64)))
        if self.alpha.shape != self.beta.shape:
            raise ValueError("alpha and beta must have the same length")
        if not (np.all(np.isfinite(self.alpha)) and np.all(np.isfinite(self.beta))):
            raise ValueError("shape parameters must be finite")
        if np.any(self.alpha <= 0.0) or np.any(self.beta <= 0.0):
            raise ValueError("shape parameters must be strictly positive")


class ShapeSamples(Sequence[ShapeSample]):
    """A batch of shape draws, stored as (S, N) arrays for fast kernels."""

    def __init__(self, alpha: np.ndarray, beta: np.ndarray):
        alpha = np.asarray(alpha, dtype=np.float64)
        beta = np.asarray(beta, dtype=np.float64)
        if alpha.ndim != 2 or alpha.shape != beta.shape:
            raise ValueError("expected matching (n_samples, n_metrics) arrays")
        self.alpha = alpha
        self.beta = beta

    @property
    def n_metrics(self) -> int:
        return self.alpha.shape[1]

    def __len__(self) -> int:
        return self.alpha.shape[0]

    def __getitem__(self, idx) -> ShapeSample:
        if isinstance(idx, slice):
            return ShapeSamples(self.alpha[idx], self.beta[idx])
        return ShapeSample(self.alpha[idx], self.beta[idx])

    def __iter__(self) -> Iterator[ShapeSample]:
        for s in range(len(self)):
            yield self[s]

    @classmethod
    def stack(cls, samples: Sequence[ShapeSample]) -> "ShapeSamples":
        return cls(
            np.stack([s.alpha for s in samples]),
            np.stack([s.beta for s in samples]),
        )


def standard_normal_draws(count: int, n_metrics: int, seed: SeedLike) -> np.ndarray:
    """The (count, 2, N) standard-normal draws behind `sample_shapes`.

    Kept separate so that a fixed seed yields fixed draws regardless of
    the hyperparameters they are later combined with (common random
    numbers).
    """
    if count < 1:
        raise ValueError("count must be positive")
    return _rng(seed).standard_normal((count, 2, n_metrics))


def shapes_from_draws(theta: HyperParams, z: np.ndarray) -> ShapeSamples:
    """Apply hyperparameters to pre-drawn standard normals, with clamping."""
    lo, hi = SHAPE_CLAMP
    alpha = np.clip(np.exp(theta.mu_alpha + theta.sigma_alpha * z[:, 0, :]), lo, hi)
    beta = np.clip(np.exp(theta.mu_beta + theta.sigma_beta * z[:, 1, :]), lo, hi)
    return ShapeSamples(alpha, beta)


def sample_shapes(theta: HyperParams, count: int, seed: SeedLike) -> ShapeSamples:
    """Draw `count` independent shape samples from the log-normal priors."""
    z = standard_normal_draws(count, theta.n_metrics, seed)
    return shapes_from_draws(theta, z)


def individual_utility(x: float, alpha: float, beta: float, direction: Direction) -> float:
    """Single-metric utility: I_x(alpha, beta), or 1 - I_x for minimized metrics."""
    value = betainc(alpha, beta, x)
    if Direction(direction) is Direction.MINIMIZE:
        return 1.0 - value
    return value


def joint_utilities(points: np.ndarray, shapes: ShapeSamples, space: MetricSpace) -> np.ndarray:
    """Joint utility of each point under each shape sample; returns (S, P)."""
    points = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    if points.shape[1] != space.n_metrics:
        raise ValueError(
            f"points have {points.shape[1]} metrics, space has {space.n_metrics}"
        )
    if shapes.n_metrics != space.n_metrics:
        raise ValueError("shape samples are dimensioned for a different space")
    return joint_utility_kernel(points, space.minimize_mask, shapes.alpha, shapes.beta)


def joint_utility(f, sample: ShapeSample, space: MetricSpace) -> float:
    """Product of the individual utilities of one point under one sample."""
    f = check_point(f, space)
    if sample.alpha.shape[0] != space.n_metrics:
        raise ValueError("shape sample is dimensioned for a different space")
    u = 1.0
    for i, direction in enumerate(space.directions):
        u *= individual_utility(f[i], sample.alpha[i], sample.beta[i], direction)
    return u


def utility_difference(f1, f2, sample: ShapeSample, space: MetricSpace) -> float:
    """joint_utility(f2) - joint_utility(f1); antisymmetric in its arguments."""
    return joint_utility(f2, sample, space) - joint_utility(f1, sample, space)


@dataclass(frozen=True)
class UtilityCurveSummary:
    """Pointwise quantile summary of one metric's sampled utility curves."""

    grid: np.ndarray
    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    direction: Direction

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "median": self.median.tolist(),
            "q25": self.q25.tolist(),
            "q75": self.q75.tolist(),
            "direction": self.direction.value,
        }


def curve_summary(
    theta: HyperParams,
    metric_index: int,
    space: MetricSpace,
    n_samples: int = 1000,
    grid_size: int = 101,
    seed: SeedLike = 0,
) -> UtilityCurveSummary:
    """Median and interquartile band of one metric's individual utility.

    Evaluates the sampled utility curves on an even grid and summarizes
    them pointwise.  The returned curves are nudged through a running
    max/min so that float-level wobble can never break the monotonicity
    the model guarantees mathematically.
    """
    if not 0 <= metric_index < theta.n_metrics:
        raise IndexError(f"metric_index {metric_index} out of range for N={theta.n_metrics}")
    if theta.n_metrics != space.n_metrics:
        raise ValueError("hyperparameters and space disagree on the metric count")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    shapes = sample_shapes(theta, n_samples, seed)
    grid = np.linspace(0.0, 1.0, grid_size)
    minimize = bool(space.minimize_mask[metric_index])
    curves = utility_curve_kernel(
        grid, minimize, shapes.alpha[:, metric_index], shapes.beta[:, metric_index]
    )
    q25, median, q75 = np.quantile(curves, [0.25, 0.5, 0.75], axis=0)
    guard = np.minimum.accumulate if minimize else np.maximum.accumulate
    return UtilityCurveSummary(
        grid=grid,
        median=guard(median),
        q25=guard(q25),
        q75=guard(q75),
        direction=space.directions[metric_index],
    )
