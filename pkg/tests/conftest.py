import numpy as np
import pytest

from prefbeta import FitConfig, HyperParams, MetricSpace


@pytest.fixture
def space2():
    return MetricSpace(["maximize", "maximize"])


@pytest.fixture
def space2_mixed():
    return MetricSpace(["maximize", "minimize"])


@pytest.fixture
def theta2():
    return HyperParams(
        mu_alpha=[0.3, -0.2],
        sigma_alpha=[0.5, 0.8],
        mu_beta=[0.1, 0.6],
        sigma_beta=[0.7, 0.4],
        sigma_e=0.05,
    )


@pytest.fixture
def quick_fit_config():
    """A small fit budget for contract tests (quality is tested elsewhere)."""
    return FitConfig(n_starts=3, max_evals_per_start=60, mc_samples=64, base_seed=7)


def random_theta(rng: np.random.Generator, n_metrics: int) -> HyperParams:
    return HyperParams(
        mu_alpha=rng.uniform(np.log(0.1), np.log(20), n_metrics),
        sigma_alpha=rng.uniform(0.05, 2.0, n_metrics),
        mu_beta=rng.uniform(np.log(0.1), np.log(20), n_metrics),
        sigma_beta=rng.uniform(0.05, 2.0, n_metrics),
        sigma_e=float(rng.uniform(1e-3, 0.5)),
    )
