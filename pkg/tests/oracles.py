"""Independent numerical oracles the tests check the library against.

These deliberately avoid the library's own code paths: the beta CDF is
integrated with adaptive quadrature, Kendall's tau is counted pair by
pair, and the single-metric marginal likelihood is integrated on a tensor
Gauss-Hermite grid over (log alpha, log beta).
"""

from __future__ import annotations

import warnings

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gammaln, ndtr


def beta_cdf_quadrature(x: float, a: float, b: float) -> float:
    """I_x(a, b) by adaptive quadrature of the beta density over [0, x]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_norm = gammaln(a) + gammaln(b) - gammaln(a + b)

    def density(t):
        return np.exp((a - 1.0) * np.log(t) + (b - 1.0) * np.log1p(-t) - log_norm)

    # roundoff warnings near machine precision are expected at this
    # tolerance; the caller asserts the accuracy it actually needs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(density, 0.0, x, epsabs=1e-12, epsrel=1e-12, limit=500)
    return value


def kendall_tau_bruteforce(x, y, variant: str = "b") -> float:
    """Kendall tau by explicit O(n^2) pair counting."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = np.sign(x[i] - x[j])
            dy = np.sign(y[i] - y[j])
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif dx == dy:
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    num = concordant - discordant
    if variant == "a":
        return num / n0
    # pairs tied in x include joint ties; recompute the standard tie counts
    tx = sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if x[i] == x[j]
    )
    ty = sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if y[i] == y[j]
    )
    return num / np.sqrt(float(n0 - tx) * float(n0 - ty))


class GaussHermiteLikelihoodOracle:
    """Tensor-grid integration of single-metric pair probabilities.

    Works in the standard-normal coordinates of (log alpha, log beta):
    nodes z are Gauss-Hermite (probabilists'), shapes are
    exp(mu + sigma * z), clamped exactly like the library's sampler.
    """

    def __init__(self, n_nodes: int = 80, clamp=(1e-3, 1e3)):
        nodes, weights = hermegauss(n_nodes)
        self.nodes = nodes
        self.weights = weights / np.sqrt(2.0 * np.pi)
        self.clamp = clamp

    def _utilities(self, x: float, mu_a, sg_a, mu_b, sg_b, minimize: bool) -> np.ndarray:
        """u(x) on the (alpha, beta) tensor grid; returns (n, n)."""
        from scipy.special import betainc as sp_betainc

        lo, hi = self.clamp
        alphas = np.clip(np.exp(mu_a + sg_a * self.nodes), lo, hi)
        betas = np.clip(np.exp(mu_b + sg_b * self.nodes), lo, hi)
        A, B = np.meshgrid(alphas, betas, indexing="ij")
        if x <= 0.0:
            U = np.zeros_like(A)
        elif x >= 1.0:
            U = np.ones_like(A)
        else:
            U = sp_betainc(A, B, x)
        return 1.0 - U if minimize else U

    def _diff_grid(self, x1, x2, theta, minimize: bool) -> np.ndarray:
        mu_a, sg_a = theta.mu_alpha[0], theta.sigma_alpha[0]
        mu_b, sg_b = theta.mu_beta[0], theta.sigma_beta[0]
        u1 = self._utilities(x1, mu_a, sg_a, mu_b, sg_b, minimize)
        u2 = self._utilities(x2, mu_a, sg_a, mu_b, sg_b, minimize)
        return u2 - u1

    def preference_probability(self, worse, better, theta, minimize=False) -> float:
        """Integral of the Heaviside of the utility difference (ties half)."""
        diff = self._diff_grid(float(worse), float(better), theta, minimize)
        h = np.where(diff > 0, 1.0, np.where(diff == 0, 0.5, 0.0))
        w2 = np.outer(self.weights, self.weights)
        return float((h * w2).sum() / w2.sum())

    def equivalence_probability(self, a, b, theta, minimize=False) -> float:
        """Integral of 2*Phi(-|u_d|/sigma_e)."""
        diff = self._diff_grid(float(a), float(b), theta, minimize)
        vals = 2.0 * ndtr(-np.abs(diff) / theta.sigma_e)
        w2 = np.outer(self.weights, self.weights)
        return float((vals * w2).sum() / w2.sum())
