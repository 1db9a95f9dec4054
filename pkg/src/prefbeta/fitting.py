"""Maximum-likelihood estimation of the utility hyperparameters.

The search space is the 4N+1 box below, with scale coordinates optimized
in log-space.  Because the Monte-Carlo likelihood is deterministic under
common random numbers but not smooth, the optimizer is multi-start
Nelder-Mead: a Latin-hypercube set of starts plus the box center, plus an
optional warm start carried between refits of a growing dataset.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .likelihood import MC_SAMPLES_FIT, PreferenceDataset, _log_ml_from_draws
from .model import HyperParams, standard_normal_draws
from .space import MetricSpace

# Per-coordinate search box: locations of log-shape in [log 0.1, log 20]
# (beta shapes from sharply thresholded to near-linear), scales in
# [0.01, 2], equivalence scale in [1e-4, 0.5].
MU_BOUNDS = (float(np.log(0.1)), float(np.log(20.0)))
SIGMA_BOUNDS = (0.01, 2.0)
SIGMA_E_BOUNDS = (1e-4, 0.5)


def default_bounds(n_metrics: int) -> np.ndarray:
    """The default (4N+1, 2) box for the packed hyperparameter vector."""
    rows = []
    for _ in range(n_metrics):
        rows += [MU_BOUNDS, SIGMA_BOUNDS, MU_BOUNDS, SIGMA_BOUNDS]
    rows.append(SIGMA_E_BOUNDS)
    return np.array(rows, dtype=np.float64)


def _sigma_coordinates(n_coords: int) -> np.ndarray:
    """Mask of coordinates that are scales (optimized in log-space)."""
    mask = np.zeros(n_coords, dtype=bool)
    mask[1:-1:4] = True  # sigma_alpha_i
    mask[3:-1:4] = True  # sigma_beta_i
    mask[-1] = True      # sigma_e
    return mask


def _to_search(vec: np.ndarray, sigma_mask: np.ndarray) -> np.ndarray:
    out = vec.astype(np.float64, copy=True)
    out[sigma_mask] = np.log(out[sigma_mask])
    return out


def _from_search(t: np.ndarray, sigma_mask: np.ndarray) -> np.ndarray:
    out = t.astype(np.float64, copy=True)
    out[sigma_mask] = np.exp(out[sigma_mask])
    return out


@dataclass(frozen=True)
class FitConfig:
    """Knobs of one maximum-likelihood fit.

    bounds : (4N+1, 2) array or None for the defaults
    n_starts : Latin-hypercube starts, in addition to the box center
    max_evals_per_start : Nelder-Mead function-evaluation budget per start
    mc_samples : Monte-Carlo sample count of the likelihood estimate
    base_seed : seeds both the likelihood draws and the start placement
    """

    bounds: Optional[np.ndarray] = None
    n_starts: int = 16
    max_evals_per_start: int = 200
    mc_samples: int = MC_SAMPLES_FIT
    base_seed: int = 0

    def resolved_bounds(self, n_metrics: int) -> np.ndarray:
        bounds = self.bounds if self.bounds is not None else default_bounds(n_metrics)
        bounds = np.asarray(bounds, dtype=np.float64)
        if bounds.shape != (4 * n_metrics + 1, 2):
            raise ValueError(
                f"bounds must have shape ({4 * n_metrics + 1}, 2), got {bounds.shape}"
            )
        if np.any(bounds[:, 0] >= bounds[:, 1]):
            raise ValueError("every bound must satisfy lo < hi")
        sigma_mask = _sigma_coordinates(bounds.shape[0])
        if np.any(bounds[sigma_mask, 0] <= 0.0):
            raise ValueError("scale coordinates must have strictly positive lower bounds")
        return bounds

    def to_dict(self) -> dict:
        return {
            "bounds": None if self.bounds is None else np.asarray(self.bounds).tolist(),
            "n_starts": self.n_starts,
            "max_evals_per_start": self.max_evals_per_start,
            "mc_samples": self.mc_samples,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        bounds = d.get("bounds")
        return cls(
            bounds=None if bounds is None else np.asarray(bounds, dtype=np.float64),
            n_starts=int(d["n_starts"]),
            max_evals_per_start=int(d["max_evals_per_start"]),
            mc_samples=int(d["mc_samples"]),
            base_seed=int(d["base_seed"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, FitConfig):
            return NotImplemented
        same_bounds = (
            (self.bounds is None and other.bounds is None)
            or (
                self.bounds is not None
                and other.bounds is not None
                and np.array_equal(self.bounds, other.bounds)
            )
        )
        return same_bounds and (
            self.n_starts,
            self.max_evals_per_start,
            self.mc_samples,
            self.base_seed,
        ) == (
            other.n_starts,
            other.max_evals_per_start,
            other.mc_samples,
            other.base_seed,
        )


def box_center(n_metrics: int, bounds: Optional[np.ndarray] = None) -> HyperParams:
    """The canonical prior-center hyperparameters: the midpoint of the
    search box in transformed coordinates (scales at geometric midpoint)."""
    if bounds is None:
        bounds = default_bounds(n_metrics)
    sigma_mask = _sigma_coordinates(bounds.shape[0])
    lo = _to_search(bounds[:, 0], sigma_mask)
    hi = _to_search(bounds[:, 1], sigma_mask)
    return HyperParams.from_vector(_from_search((lo + hi) / 2.0, sigma_mask), n_metrics)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a multi-start fit."""

    theta_mle: HyperParams
    log_likelihood: float
    n_evaluations: int
    mc_seed: int
    trace: list[tuple[HyperParams, float]] = field(default_factory=list)


def fit_mle(
    data: PreferenceDataset,
    config: FitConfig,
    space: MetricSpace,
    warm_start: Optional[HyperParams] = None,
) -> FitResult:
    """Maximize the Monte-Carlo marginal likelihood over the bounded box.

    Deterministic for a fixed (data, config, warm_start): the likelihood
    draws and start placement derive from config.base_seed, and ties
    between starts break toward the lowest start index.  An empty dataset
    has a constant likelihood, so the box-center hyperparameters are
    returned unchanged.
    """
    n = space.n_metrics
    bounds = config.resolved_bounds(n)
    sigma_mask = _sigma_coordinates(bounds.shape[0])
    t_lo = _to_search(bounds[:, 0], sigma_mask)
    t_hi = _to_search(bounds[:, 1], sigma_mask)

    seeder = np.random.default_rng(config.base_seed)
    mc_seed = int(seeder.integers(2**63))
    lhs_seed = int(seeder.integers(2**63))

    center = box_center(n, bounds)
    if len(data) == 0:
        return FitResult(
            theta_mle=center, log_likelihood=0.0, n_evaluations=0, mc_seed=mc_seed
        )

    z = standard_normal_draws(config.mc_samples, n, mc_seed)
    packed = data.packed()

    def negative_log_ml(t: np.ndarray) -> float:
        t = np.clip(t, t_lo, t_hi)
        theta = HyperParams.from_vector(_from_search(t, sigma_mask), n)
        return -_log_ml_from_draws(theta, z, packed, space)

    starts = [_to_search(center.to_vector(), sigma_mask)]
    if config.n_starts > 0:
        lhs = qmc.LatinHypercube(d=bounds.shape[0], seed=lhs_seed)
        starts.extend(t_lo + lhs.random(config.n_starts) * (t_hi - t_lo))
    if warm_start is not None:
        if warm_start.n_metrics != n:
            raise ValueError("warm start is dimensioned for a different space")
        warm_t = np.clip(_to_search(warm_start.to_vector(), sigma_mask), t_lo, t_hi)
        starts.append(warm_t)

    best_fun = np.inf
    best_t = starts[0]
    n_evaluations = 0
    trace: list[tuple[HyperParams, float]] = []
    nm_bounds = list(zip(t_lo, t_hi))
    for t0 in starts:
        res = minimize(
            negative_log_ml,
            t0,
            method="Nelder-Mead",
            bounds=nm_bounds,
            options={
                "maxfev": config.max_evals_per_start,
                "xatol": 1e-4,
                "fatol": 1e-7,
            },
        )
        n_evaluations += res.nfev
        t_best = np.clip(res.x, t_lo, t_hi)
        theta_j = HyperParams.from_vector(_from_search(t_best, sigma_mask), n)
        trace.append((theta_j, -res.fun))
        if res.fun < best_fun:
            best_fun = res.fun
            best_t = t_best

    theta_mle = HyperParams.from_vector(_from_search(best_t, sigma_mask), n)
    return FitResult(
        theta_mle=theta_mle,
        log_likelihood=-best_fun,
        n_evaluations=n_evaluations,
        mc_seed=mc_seed,
        trace=trace,
    )
