import numpy as np
import pytest
import scipy.special as sp

from prefbeta import betainc
from prefbeta.special import joint_utility_kernel, utility_curve_kernel

from .oracles import beta_cdf_quadrature


def test_uniform_cdf_is_identity():
    assert betainc(1.0, 1.0, 0.37) == pytest.approx(0.37, abs=1e-12)


def test_endpoints():
    assert betainc(3.2, 0.7, 0.0) == 0.0
    assert betainc(3.2, 0.7, 1.0) == 1.0


def test_symmetric_midpoint():
    assert betainc(2.0, 2.0, 0.5) == pytest.approx(0.5, abs=1e-12)


def test_against_quadrature_spot():
    expected = beta_cdf_quadrature(0.3, 2.0, 5.0)
    assert betainc(2.0, 5.0, 0.3) == pytest.approx(expected, abs=1e-8)


def test_against_quadrature_random():
    rng = np.random.default_rng(42)
    for _ in range(200):
        a, b = np.exp(rng.uniform(np.log(0.05), np.log(50.0), 2))
        x = rng.uniform(0.0, 1.0)
        assert betainc(a, b, x) == pytest.approx(
            beta_cdf_quadrature(x, a, b), abs=1e-8
        )


def test_against_scipy_wide_range():
    rng = np.random.default_rng(3)
    a = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 5000))
    b = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 5000))
    x = rng.uniform(0.0, 1.0, 5000)
    ours = np.array([betainc(a[i], b[i], x[i]) for i in range(5000)])
    assert np.max(np.abs(ours - sp.betainc(a, b, x))) < 1e-10


def test_monotone_in_x():
    rng = np.random.default_rng(11)
    for _ in range(300):
        a, b = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 2))
        xs = np.sort(rng.uniform(0.0, 1.0, 40))
        vals = np.array([betainc(a, b, t) for t in xs])
        assert np.all(np.diff(vals) >= 0.0)


def test_domain_errors():
    with pytest.raises(ValueError):
        betainc(-1.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        betainc(2.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        betainc(2.0, 2.0, 1.5)


def test_joint_kernel_matches_scalar_product():
    rng = np.random.default_rng(5)
    alpha = np.exp(rng.uniform(-1, 2, (6, 3)))
    beta = np.exp(rng.uniform(-1, 2, (6, 3)))
    points = rng.uniform(0, 1, (4, 3))
    minimize = np.array([False, True, False])
    out = joint_utility_kernel(points, minimize, alpha, beta)
    for s in range(6):
        for p in range(4):
            expected = 1.0
            for i in range(3):
                v = betainc(alpha[s, i], beta[s, i], points[p, i])
                expected *= (1.0 - v) if minimize[i] else v
            assert out[s, p] == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_curve_kernel_matches_scalar():
    rng = np.random.default_rng(6)
    alpha = np.exp(rng.uniform(-1, 2, 5))
    beta = np.exp(rng.uniform(-1, 2, 5))
    grid = np.linspace(0, 1, 11)
    out = utility_curve_kernel(grid, True, alpha, beta)
    for s in range(5):
        for g, x in enumerate(grid):
            assert out[s, g] == pytest.approx(1.0 - betainc(alpha[s], beta[s], x), abs=1e-14)
