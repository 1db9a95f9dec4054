"""prefbeta: active pairwise-preference learning of multi-metric utilities.

A scalar utility over N competing performance metrics is modeled as a
product of per-metric beta-CDF utilities with log-normal priors on the
shape parameters.  The package fits the 4N+1 hyperparameters by
Monte-Carlo maximum marginal likelihood from pairwise comparisons,
actively selects the most informative query pairs, and exposes the
learned utility for introspection, ranking, and benchmarking.
"""

from .acquisition import (
    PolicyKind,
    QueryPair,
    QueryPolicy,
    acquisition_value,
    propose_query,
    sample_incomparable_pairs,
)
from .bench import (
    TABLE1,
    BenchResult,
    Constraint,
    TestUtility,
    evaluate_model,
    holdout_points,
    kendall_tau,
    run_benchmark,
    session_budget,
    simulated_oracle,
    table1_suite,
)
from .estimator import PreferenceUtilityModel
from .fitting import FitConfig, FitResult, box_center, default_bounds, fit_mle
from .likelihood import (
    MC_SAMPLES_FIT,
    MC_SAMPLES_REPORT,
    EquivalencePair,
    LikelihoodEstimate,
    PreferenceDataset,
    PreferencePair,
    equivalence_pair_probability,
    log_marginal_likelihood,
    preference_pair_probability,
)
from .model import (
    SHAPE_CLAMP,
    HyperParams,
    ShapeSample,
    ShapeSamples,
    UtilityCurveSummary,
    curve_summary,
    individual_utility,
    joint_utilities,
    joint_utility,
    sample_shapes,
    utility_difference,
)
from .session import (
    BudgetExhaustedError,
    HistoryEntry,
    NoPendingQueryError,
    OracleResponse,
    PreferenceSession,
    SessionFormatError,
    SessionReplayError,
    init_session,
    load_session,
    replay_session,
    save_session,
)
from .space import (
    Direction,
    MetricSpace,
    check_point,
    check_points,
    dominates,
    incomparable,
)
from .special import betainc

__version__ = "0.1.0"

__all__ = [
    "PolicyKind", "QueryPair", "QueryPolicy", "acquisition_value", "propose_query",
    "sample_incomparable_pairs",
    "TABLE1", "BenchResult", "Constraint", "TestUtility", "evaluate_model",
    "holdout_points", "kendall_tau", "run_benchmark", "session_budget",
    "simulated_oracle", "table1_suite",
    "PreferenceUtilityModel",
    "FitConfig", "FitResult", "box_center", "default_bounds", "fit_mle",
    "MC_SAMPLES_FIT", "MC_SAMPLES_REPORT", "EquivalencePair", "LikelihoodEstimate",
    "PreferenceDataset", "PreferencePair", "equivalence_pair_probability",
    "log_marginal_likelihood", "preference_pair_probability",
    "SHAPE_CLAMP", "HyperParams", "ShapeSample", "ShapeSamples", "UtilityCurveSummary",
    "curve_summary", "individual_utility", "joint_utilities", "joint_utility",
    "sample_shapes", "utility_difference",
    "BudgetExhaustedError", "HistoryEntry", "NoPendingQueryError", "OracleResponse",
    "PreferenceSession", "SessionFormatError", "SessionReplayError", "init_session",
    "load_session", "replay_session", "save_session",
    "Direction", "MetricSpace", "check_point", "check_points", "dominates", "incomparable",
    "betainc",
    "__version__",
]
