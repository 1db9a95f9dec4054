"""Scikit-learn estimator facade over the preference utility model.

Fitting consumes pairwise comparisons rather than labeled points: each row
of X stacks the two compared configurations side by side, and y says which
side won (or that the respondent saw no difference).  Prediction scores
arbitrary configurations by the fitted posterior-mean utility, so the
estimator slots into ranking pipelines, cross-validation over its
hyperparameters, and anything else expecting get_params/fit/predict.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils import check_array

from .bench import kendall_tau
from .fitting import FitConfig, fit_mle
from .likelihood import MC_SAMPLES_FIT, PreferenceDataset
from .model import UtilityCurveSummary, curve_summary, joint_utilities, sample_shapes
from .space import MetricSpace


class PreferenceUtilityModel(BaseEstimator):
    """Learns a scalar utility over [0, 1]^N from pairwise comparisons.

    Parameters
    ----------
    directions : sequence of {"maximize", "minimize"} or None
        Orientation of each metric.  None means every metric is maximized.
    n_starts : int
        Latin-hypercube starts of the multi-start fit (plus the box center).
    max_evals_per_start : int
        Function-evaluation budget per start.
    mc_samples : int
        Monte-Carlo samples of the likelihood estimate during fitting.
    n_shape_samples : int
        Shape draws behind `predict` scores and curve summaries.
    random_state : int
        Seeds the fit and the prediction-time shape draws.

    Attributes
    ----------
    space_ : MetricSpace
        The validated metric space.
    theta_ : HyperParams
        Maximum-likelihood hyperparameters.
    fit_result_ : FitResult
        Full fit outcome, including the multi-start trace.
    n_features_in_ : int
        Width of the comparison matrix seen by `fit` (2 * n_metrics).
    """

    def __init__(
        self,
        directions: Optional[Sequence[str]] = None,
        n_starts: int = 16,
        max_evals_per_start: int = 200,
        mc_samples: int = MC_SAMPLES_FIT,
        n_shape_samples: int = 1024,
        random_state: int = 0,
    ):
        self.directions = directions
        self.n_starts = n_starts
        self.max_evals_per_start = max_evals_per_start
        self.mc_samples = mc_samples
        self.n_shape_samples = n_shape_samples
        self.random_state = random_state

    def _resolve_space(self, n_metrics: int) -> MetricSpace:
        if self.directions is None:
            return MetricSpace.maximize_all(n_metrics)
        space = MetricSpace(self.directions)
        if space.n_metrics != n_metrics:
            raise ValueError(
                f"directions describe {space.n_metrics} metrics but X implies {n_metrics}"
            )
        return space

    def fit(self, X, y):
        """Fit from comparisons.

        Parameters
        ----------
        X : array-like of shape (n_comparisons, 2 * n_metrics)
            Each row is the pair [first | second], both in [0, 1]^N.
        y : array-like of shape (n_comparisons,)
            +1 if the first configuration was preferred, -1 if the second,
            0 if the respondent judged them equal.
        """
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if y.shape != (X.shape[0],):
            raise ValueError("y must have one label per comparison row")
        if X.shape[1] % 2 != 0:
            raise ValueError("X must stack two equal-width configurations per row")
        if X.size and (X.min() < 0.0 or X.max() > 1.0):
            raise ValueError("metric values must lie in [0, 1]")
        labels = set(np.unique(y).tolist())
        if not labels <= {-1, 0, 1}:
            raise ValueError(f"y values must be in {{-1, 0, 1}}, got {sorted(labels)}")

        n_metrics = X.shape[1] // 2
        space = self._resolve_space(n_metrics)
        dataset = PreferenceDataset(space)
        first, second = X[:, :n_metrics], X[:, n_metrics:]
        for i in range(X.shape[0]):
            if y[i] == 1:
                dataset.add_preference(worse=second[i], better=first[i])
            elif y[i] == -1:
                dataset.add_preference(worse=first[i], better=second[i])
            else:
                dataset.add_equivalence(first[i], second[i])

        config = FitConfig(
            n_starts=self.n_starts,
            max_evals_per_start=self.max_evals_per_start,
            mc_samples=self.mc_samples,
            base_seed=self.random_state,
        )
        self.fit_result_ = fit_mle(dataset, config, space)
        self.theta_ = self.fit_result_.theta_mle
        self.space_ = space
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "theta_"):
            raise NotFittedError("this PreferenceUtilityModel has not been fitted yet")

    def predict(self, X) -> np.ndarray:
        """Posterior-mean utility score of each configuration in [0, 1]^N."""
        self._check_fitted()
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.space_.n_metrics:
            raise ValueError(
                f"expected {self.space_.n_metrics} metric columns, got {X.shape[1]}"
            )
        if X.size and (X.min() < 0.0 or X.max() > 1.0):
            raise ValueError("metric values must lie in [0, 1]")
        shapes = sample_shapes(self.theta_, self.n_shape_samples, self.random_state)
        return joint_utilities(X, shapes, self.space_).mean(axis=0)

    def score(self, X, y) -> float:
        """Kendall tau-b between predicted scores and reference utilities."""
        return kendall_tau(self.predict(X), np.asarray(y, dtype=np.float64))

    def metric_curve(
        self, metric_index: int, n_samples: int = 1000, grid_size: int = 101
    ) -> UtilityCurveSummary:
        """Median and interquartile band of one fitted individual utility."""
        self._check_fitted()
        return curve_summary(
            self.theta_,
            metric_index,
            self.space_,
            n_samples=n_samples,
            grid_size=grid_size,
            seed=self.random_state,
        )
