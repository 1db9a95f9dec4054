import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefbeta import (
    TABLE1,
    HyperParams,
    OracleResponse,
    QueryPair,
    evaluate_model,
    holdout_points,
    kendall_tau,
    run_benchmark,
    session_budget,
    simulated_oracle,
    table1_suite,
)
from prefbeta.bench import results_to_csv, run_single_cell

from .oracles import kendall_tau_bruteforce


class TestKendallTau:
    def test_perfect_concordance(self):
        x = [3.0, 1.0, 4.0, 1.5, 9.0]
        assert kendall_tau(x, x) == 1.0

    def test_perfect_discordance(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert kendall_tau(x, -x) == -1.0

    def test_errors(self):
        with pytest.raises(ValueError):
            kendall_tau([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            kendall_tau([1.0], [2.0])
        with pytest.raises(ValueError):
            kendall_tau([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            kendall_tau([1, 2, 3], [1, 2, 3], variant="c")

    def test_matches_bruteforce_with_ties(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            n = int(rng.integers(5, 60))
            x = rng.integers(0, 8, n).astype(float)
            y = rng.integers(0, 8, n).astype(float) if trial % 2 else rng.normal(size=n)
            if np.all(x == x[0]) or np.all(y == y[0]):
                continue
            for variant in ("a", "b"):
                assert kendall_tau(x, y, variant) == pytest.approx(
                    kendall_tau_bruteforce(x, y, variant), abs=1e-12
                )

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        x, y = rng.integers(0, 5, 40).astype(float), rng.normal(size=40)
        assert kendall_tau(x, y) == pytest.approx(kendall_tau(y, x), abs=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=3, max_size=30))
    def test_invariant_under_increasing_transform(self, values):
        y = np.arange(len(values), dtype=float)
        x = np.asarray(values, dtype=float)
        if np.all(x == x[0]):
            return
        raw = kendall_tau(x, y)
        transformed = kendall_tau(np.exp(x / 3.0) + 5.0, y)
        assert raw == pytest.approx(transformed, abs=1e-15)

    def test_infinite_sentinels_rank_correctly(self):
        x = np.array([-np.inf, -np.inf, 1.0, 2.0])
        y = np.array([0.0, 0.0, 3.0, 4.0])
        assert kendall_tau(x, y) == pytest.approx(1.0)


class TestTestUtilities:
    def test_table1_has_nine(self):
        assert len(TABLE1) == 9
        assert len(table1_suite()) == 9

    def test_constraint_rule_both_infeasible(self):
        test = TABLE1["min_f1_st_f2_gt_06"]
        pair = QueryPair(a=np.array([0.2, 0.5]), b=np.array([0.9, 0.4]))
        assert simulated_oracle(test, pair) is OracleResponse.EQUAL

    def test_linear_comparison(self):
        test = TABLE1["max_f1_plus_2f2"]
        pair = QueryPair(a=np.array([0.5, 0.5]), b=np.array([0.9, 0.4]))
        assert simulated_oracle(test, pair) is OracleResponse.B

    def test_exact_tie(self):
        test = TABLE1["max_f1_score"]
        f = np.array([0.5, 0.5])
        assert simulated_oracle(test, QueryPair(a=f, b=f.copy())) is OracleResponse.EQUAL

    def test_feasible_beats_infeasible(self):
        test = TABLE1["min_f1_st_f2_gt_06"]
        pair = QueryPair(a=np.array([0.9, 0.7]), b=np.array([0.1, 0.5]))
        # a is feasible (f2 > 0.6), b is not, so a wins despite worse f1
        assert simulated_oracle(test, pair) is OracleResponse.A

    def test_minimize_objective(self):
        test = TABLE1["min_f1_st_f2_gt_06"]
        pair = QueryPair(a=np.array([0.2, 0.7]), b=np.array([0.4, 0.8]))
        assert simulated_oracle(test, pair) is OracleResponse.A

    def test_purity(self):
        test = TABLE1["max_f2_score"]
        pair = QueryPair(a=np.array([0.3, 0.8]), b=np.array([0.6, 0.2]))
        assert simulated_oracle(test, pair) is simulated_oracle(test, pair)

    def test_fscore_zero_corner(self):
        test = TABLE1["max_f1_score"]
        scores = test.oriented_scores(np.array([[0.0, 0.0], [0.5, 0.5]]))
        assert scores[0] == 0.0
        assert scores[1] == pytest.approx(0.5)


class TestHoldout:
    def test_reproducible_from_name_and_seed(self):
        t = TABLE1["max_f1_plus_2f2"]
        h1 = holdout_points(t, base_seed=5, size=100)
        h2 = holdout_points(t, base_seed=5, size=100)
        np.testing.assert_array_equal(h1, h2)
        h3 = holdout_points(TABLE1["max_f1_plus_10f2"], base_seed=5, size=100)
        assert not np.array_equal(h1, h3)

    def test_shape_and_range(self):
        h = holdout_points(TABLE1["min_f1_st_f2_gt_06_f3_lt_02"], 0, size=50)
        assert h.shape == (50, 3)
        assert h.min() >= 0.0 and h.max() <= 1.0


class TestEvaluateModel:
    def degenerate_uniform(self, n):
        return HyperParams(np.zeros(n), np.full(n, 1e-12), np.zeros(n), np.full(n, 1e-12), 0.05)

    def test_degenerate_uniform_regression_constant(self):
        """Identity utilities rank by the plain product of coordinates."""
        test = TABLE1["max_f1_plus_2f2"]
        holdout = holdout_points(test, base_seed=0)
        tau = evaluate_model(self.degenerate_uniform(2), test, holdout, 64, seed=0)
        direct = kendall_tau(holdout.prod(axis=1), holdout[:, 0] + 2 * holdout[:, 1])
        assert direct == pytest.approx(0.7486974297429743, abs=1e-12)  # frozen
        assert tau == pytest.approx(direct, abs=1e-9)

    def test_perfect_model_scores_one(self):
        test = TABLE1["max_f1_plus_2f2"]
        holdout = holdout_points(test, 0, size=500)
        true_scores = test.oriented_scores(holdout)
        assert kendall_tau(true_scores, true_scores) == 1.0

    def test_two_points_opposite(self):
        test = TABLE1["max_f1_plus_2f2"]
        # model must rank (0.9, 0.9) above (0.1, 0.1): true scores reversed
        holdout = np.array([[0.9, 0.9], [0.1, 0.1]])
        tau = evaluate_model(self.degenerate_uniform(2), test, holdout, 32, seed=1)
        assert tau == -1.0 or tau == 1.0
        flipped = kendall_tau([2.0, 1.0], [1.0, 2.0])
        assert flipped == -1.0

    def test_empty_holdout_rejected(self):
        with pytest.raises(ValueError):
            evaluate_model(
                self.degenerate_uniform(2),
                TABLE1["max_f1_plus_2f2"],
                np.empty((0, 2)),
                16,
                seed=0,
            )


class TestHarness:
    def test_budget_modes(self):
        assert session_budget(2, "inclusive") == 20
        assert session_budget(3, "additive") == 45
        with pytest.raises(ValueError):
            session_budget(2, "bonus")

    def test_single_cell_deterministic(self):
        test = TABLE1["max_f1_plus_2f2"]
        from prefbeta import FitConfig, PolicyKind

        config = FitConfig(n_starts=2, max_evals_per_start=40, mc_samples=32)
        tau1, seed1, _ = run_single_cell(test, PolicyKind.RANDOM, 0, base_seed=1,
                                         holdout_size=500, fit_config=config)
        tau2, seed2, _ = run_single_cell(test, PolicyKind.RANDOM, 0, base_seed=1,
                                         holdout_size=500, fit_config=config)
        assert (tau1, seed1) == (tau2, seed2)

    def test_run_benchmark_cardinality_and_csv(self):
        from prefbeta import PolicyKind

        suite = [TABLE1["max_f1_plus_2f2"]]
        results = run_benchmark(
            suite,
            [PolicyKind.RANDOM, "pair_entropy"],
            runs=1,
            base_seed=0,
            holdout_size=400,
        )
        assert len(results) == 2
        assert {r.policy for r in results} == {"random", "pair_entropy"}
        assert all(len(r.taus) == 1 and -1 <= r.taus[0] <= 1 for r in results)
        csv = results_to_csv(results)
        lines = csv.strip().split("\n")
        assert lines[0] == "utility,policy,run,seed,tau,wall_ms"
        assert len(lines) == 3
