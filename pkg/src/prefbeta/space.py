"""Metric space definition and input validation helpers.

Points live in the unit box [0, 1]^N, one coordinate per performance
metric.  Each metric carries an orientation: maximized metrics use the
beta CDF as their individual utility, minimized metrics the survival
function.  "Direction adjustment" below means negating minimized
coordinates so that larger is uniformly better.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np


class Direction(str, Enum):
    """Orientation of one metric: is a larger raw value better or worse."""

    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


DirectionLike = Union[Direction, str]


def _as_direction(d: DirectionLike) -> Direction:
    if isinstance(d, Direction):
        return d
    try:
        return Direction(str(d).lower())
    except ValueError:
        raise ValueError(f"unknown direction {d!r}; use 'maximize' or 'minimize'") from None


@dataclass(frozen=True)
class MetricSpace:
    """The domain of metric configurations: [0, 1]^N with orientations."""

    directions: tuple[Direction, ...]

    def __init__(self, directions: Iterable[DirectionLike]):
        dirs = tuple(_as_direction(d) for d in directions)
        if len(dirs) < 1:
            raise ValueError("a metric space needs at least one metric")
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def maximize_all(cls, n_metrics: int) -> "MetricSpace":
        return cls([Direction.MAXIMIZE] * n_metrics)

    @property
    def n_metrics(self) -> int:
        return len(self.directions)

    @property
    def minimize_mask(self) -> np.ndarray:
        """Boolean mask, True where the metric is minimized."""
        return np.array([d is Direction.MINIMIZE for d in self.directions], dtype=bool)

    def adjusted(self, points: np.ndarray) -> np.ndarray:
        """Direction-adjusted coordinates: larger is better everywhere."""
        return np.where(self.minimize_mask, -points, points)


def check_point(x, space: MetricSpace) -> np.ndarray:
    """Validate one metric vector against its space; returns float64 (N,)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (space.n_metrics,):
        raise ValueError(
            f"expected a metric vector of shape ({space.n_metrics},), got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("metric values must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"metric values must lie in [0, 1], got {arr}")
    return arr


def check_points(X, space: MetricSpace) -> np.ndarray:
    """Validate a batch of metric vectors; returns float64 (P, N)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != space.n_metrics:
        raise ValueError(
            f"expected points of shape (n, {space.n_metrics}), got {np.shape(X)}"
        )
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("metric values must be finite and lie in [0, 1]")
    return arr


def dominates(a: np.ndarray, b: np.ndarray, space: MetricSpace) -> bool:
    """True if `a` is at least as good as `b` in every metric after
    direction adjustment."""
    aa, bb = space.adjusted(a), space.adjusted(b)
    return bool(np.all(aa >= bb))


def incomparable(f1, f2, space: MetricSpace) -> bool:
    """True iff neither point dominates the other.

    After direction adjustment, each point must strictly exceed the other
    in at least one coordinate.  Pairs failing this predicate have a
    preference forced by monotonicity and are never worth presenting.
    """
    a = space.adjusted(check_point(f1, space))
    b = space.adjusted(check_point(f2, space))
    return bool(np.any(a > b) and np.any(b > a))


def incomparable_mask(A: np.ndarray, B: np.ndarray, space: MetricSpace) -> np.ndarray:
    """Vectorized incomparability of row-aligned point batches."""
    aa, bb = space.adjusted(A), space.adjusted(B)
    return (aa > bb).any(axis=1) & ((bb > aa).any(axis=1))
