import math

import numpy as np
import pytest
from scipy.special import ndtr

from prefbeta import (
    EquivalencePair,
    HyperParams,
    MetricSpace,
    PreferenceDataset,
    PreferencePair,
    equivalence_pair_probability,
    joint_utilities,
    log_marginal_likelihood,
    preference_pair_probability,
    sample_shapes,
)

from .conftest import random_theta
from .oracles import GaussHermiteLikelihoodOracle


@pytest.fixture
def shapes2(theta2):
    return sample_shapes(theta2, 128, 42)


class TestPreferencePairProbability:
    def test_dominant_better(self, theta2, space2, shapes2):
        pair = PreferencePair(worse=np.array([0.2, 0.3]), better=np.array([0.8, 0.9]))
        S = len(shapes2)
        assert preference_pair_probability(pair, shapes2, space2) == (S + 1) / (S + 2)

    def test_self_pair_is_half(self, theta2, space2, shapes2):
        f = np.array([0.4, 0.6])
        pair = PreferencePair(worse=f, better=f)
        assert preference_pair_probability(pair, shapes2, space2) == 0.5

    def test_empty_shapes_error(self, theta2, space2):
        empty = sample_shapes(theta2, 1, 0)[0:0]
        pair = PreferencePair(np.array([0.2, 0.8]), np.array([0.8, 0.2]))
        with pytest.raises(ValueError):
            preference_pair_probability(pair, empty, space2)

    def test_in_open_interval(self, space2, shapes2):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, b = rng.uniform(0, 1, (2, 2))
            p = preference_pair_probability(PreferencePair(a, b), shapes2, space2)
            assert 0.0 < p < 1.0


class TestEquivalencePairProbability:
    def test_identical_pair_is_one(self, space2, shapes2):
        f = np.array([0.3, 0.7])
        assert equivalence_pair_probability(EquivalencePair(f, f), shapes2, 0.1, space2) == 1.0

    def test_huge_sigma_approaches_one(self, space2, shapes2):
        pair = EquivalencePair(np.array([0.1, 0.9]), np.array([0.9, 0.1]))
        assert equivalence_pair_probability(pair, shapes2, 1e9, space2) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_monotone_in_sigma(self, space2, shapes2):
        pair = EquivalencePair(np.array([0.2, 0.9]), np.array([0.7, 0.3]))
        values = [
            equivalence_pair_probability(pair, shapes2, s, space2)
            for s in (0.05, 0.1, 0.2, 0.5)
        ]
        assert all(v2 >= v1 for v1, v2 in zip(values, values[1:]))

    def test_invalid_sigma(self, space2, shapes2):
        pair = EquivalencePair(np.array([0.2, 0.9]), np.array([0.7, 0.3]))
        with pytest.raises(ValueError):
            equivalence_pair_probability(pair, shapes2, 0.0, space2)


class TestLogMarginalLikelihood:
    def test_empty_dataset_is_zero(self, theta2, space2):
        data = PreferenceDataset(space2)
        est = log_marginal_likelihood(data, theta2, 64, seed=0)
        assert est.log_value == 0.0

    def test_self_equal_pair_is_zero(self, theta2, space2):
        data = PreferenceDataset(space2)
        with pytest.warns(UserWarning):
            data.add_equivalence([0.4, 0.4], [0.4, 0.4])
        assert log_marginal_likelihood(data, theta2, 64, seed=0).log_value == 0.0

    def test_nonempty_preferences_negative(self, theta2, space2):
        data = PreferenceDataset(space2)
        data.add_preference(worse=[0.8, 0.2], better=[0.2, 0.8])
        assert log_marginal_likelihood(data, theta2, 64, seed=0).log_value < 0.0

    def test_determinism(self, theta2, space2):
        data = PreferenceDataset(space2)
        data.add_preference(worse=[0.8, 0.2], better=[0.2, 0.8])
        data.add_equivalence([0.5, 0.6], [0.6, 0.5])
        a = log_marginal_likelihood(data, theta2, 256, seed=11).log_value
        b = log_marginal_likelihood(data, theta2, 256, seed=11).log_value
        assert a == b

    def test_adding_pairs_never_increases(self, theta2, space2):
        rng = np.random.default_rng(8)
        data = PreferenceDataset(space2)
        previous = log_marginal_likelihood(data, theta2, 128, seed=5).log_value
        for k in range(12):
            a, b = rng.uniform(0, 1, (2, 2))
            if k % 3 == 0:
                data.add_equivalence(a, b)
            else:
                lo, hi = (a, b) if rng.random() < 0.5 else (b, a)
                data.add_preference(worse=lo, better=hi)
            current = log_marginal_likelihood(data, theta2, 128, seed=5).log_value
            assert current <= previous
            previous = current

    def test_order_invariance(self, theta2, space2):
        rng = np.random.default_rng(9)
        pairs = [rng.uniform(0, 1, (2, 2)) for _ in range(8)]
        data1 = PreferenceDataset(space2)
        data2 = PreferenceDataset(space2)
        for a, b in pairs:
            data1.add_preference(worse=a, better=b)
        for a, b in reversed(pairs):
            data2.add_preference(worse=a, better=b)
        data1.add_equivalence([0.1, 0.9], [0.8, 0.3])
        data2.add_equivalence([0.1, 0.9], [0.8, 0.3])
        v1 = log_marginal_likelihood(data1, theta2, 128, seed=3).log_value
        v2 = log_marginal_likelihood(data2, theta2, 128, seed=3).log_value
        assert v1 == v2

    def test_dominance_consistent_dataset_factor(self, space2):
        """Every direction-consistent pair contributes (S+1)/(S+2).

        Theta only needs to keep the sampled utilities float-resolvable:
        with extreme shape draws both utilities of a pair can saturate to
        the same double, which the estimator counts as a half-tie.  The
        mathematical factor is theta-free, so a moderate spread suffices.
        """
        rng = np.random.default_rng(10)
        data = PreferenceDataset(space2)
        n_pairs, S = 6, 128
        for _ in range(n_pairs):
            worse = rng.uniform(0.1, 0.4, 2)
            better = worse + rng.uniform(0.1, 0.5, 2)
            data.add_preference(worse=worse, better=np.minimum(better, 1.0))
        thetas = [
            HyperParams([0.0, 0.7], [0.2, 0.3], [0.5, -0.5], [0.4, 0.2], 0.05),
            HyperParams([-0.7, 1.5], [0.5, 0.5], [1.0, 0.3], [0.5, 0.5], 0.2),
            HyperParams([2.0, 2.0], [0.1, 0.6], [-1.0, 2.0], [0.6, 0.1], 0.01),
        ]
        for theta in thetas:
            est = log_marginal_likelihood(data, theta, S, seed=4)
            assert est.log_value == pytest.approx(
                n_pairs * math.log((S + 1) / (S + 2)), abs=1e-12
            )

    def test_matches_per_pair_composition(self, theta2, space2):
        """The batched estimate equals composing the per-pair operations."""
        rng = np.random.default_rng(12)
        data = PreferenceDataset(space2)
        for _ in range(4):
            a, b = rng.uniform(0, 1, (2, 2))
            data.add_preference(worse=a, better=b)
        for _ in range(3):
            a, b = rng.uniform(0, 1, (2, 2))
            data.add_equivalence(a, b)
        S, seed = 256, 21
        est = log_marginal_likelihood(data, theta2, S, seed=seed)
        shapes = sample_shapes(theta2, S, seed)
        expected = math.fsum(
            [
                math.log(preference_pair_probability(p, shapes, space2))
                for p in data.preferences
            ]
            + [
                math.log(
                    equivalence_pair_probability(p, shapes, theta2.sigma_e, space2)
                )
                for p in data.equivalences
            ]
        )
        assert est.log_value == pytest.approx(expected, abs=1e-12)


class TestAgainstGaussHermite:
    def test_single_metric_preference(self):
        space = MetricSpace.maximize_all(1)
        oracle = GaussHermiteLikelihoodOracle(n_nodes=60)
        theta = HyperParams([0.5], [0.6], [0.2], [0.9], 0.08)
        data = PreferenceDataset(space)
        data.add_preference(worse=[0.3], better=[0.7])
        S = 100_000
        est = log_marginal_likelihood(data, theta, S, seed=17)
        mc_p = math.exp(est.log_value)
        quad_p = oracle.preference_probability(0.3, 0.7, theta)
        se = math.sqrt(max(mc_p * (1 - mc_p), 1.0 / S) / S)
        assert abs(mc_p - quad_p) <= 3 * se + 1e-12

    def test_single_metric_equivalence(self):
        space = MetricSpace.maximize_all(1)
        oracle = GaussHermiteLikelihoodOracle(n_nodes=60)
        theta = HyperParams([0.5], [0.6], [0.2], [0.9], 0.08)
        data = PreferenceDataset(space)
        data.add_equivalence([0.35], [0.55])
        S = 100_000
        est = log_marginal_likelihood(data, theta, S, seed=23)
        mc_p = math.exp(est.log_value)
        quad_p = oracle.equivalence_probability(0.35, 0.55, theta)
        shapes = sample_shapes(theta, S, 23)
        U = joint_utilities(np.array([[0.35], [0.55]]), shapes, space)
        draws = 2.0 * ndtr(-np.abs(U[:, 1] - U[:, 0]) / theta.sigma_e)
        se = draws.std(ddof=1) / math.sqrt(S)
        assert abs(mc_p - quad_p) <= 3 * se + 1e-9
