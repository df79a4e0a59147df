"""Shared test helpers: instance generators and independent oracles."""

from __future__ import annotations

import numpy as np

from sgpl.plfit import PairData, PLFit, fixed_point_residuals, total_loglik


def make_pair_data(
    q: int, beta: float, sigma2: float, lam: float, seed: int
) -> PairData:
    """Pairs with truly bivariate-correlated errors at the given parameters."""
    rng = np.random.default_rng(seed)
    x_i = rng.normal(0.0, 1.0, q)
    x_l = rng.normal(0.0, 1.0, q)
    z1 = rng.normal(0.0, 1.0, q)
    z2 = rng.normal(0.0, 1.0, q)
    e_i = np.sqrt(sigma2) * z1
    e_l = np.sqrt(sigma2) * (lam * z1 + np.sqrt(1.0 - lam * lam) * z2)
    return PairData(x_i=x_i, x_l=x_l, y_i=beta * x_i + e_i, y_l=beta * x_l + e_l)


def fd_gradient(theta: tuple[float, float, float], data: PairData) -> np.ndarray:
    """Central-difference gradient of the pairwise objective (step 1e-6 relative)."""
    theta = np.asarray(theta, dtype=np.float64)
    grad = np.empty(3)
    for k in range(3):
        h = 1e-6 * max(abs(theta[k]), 1.0)
        up = theta.copy()
        dn = theta.copy()
        up[k] += h
        dn[k] -= h
        grad[k] = (total_loglik(tuple(up), data) - total_loglik(tuple(dn), data)) / (2.0 * h)
    return grad


def assert_converged_fit_is_stationary(fit: PLFit, data: PairData) -> None:
    """Converged fits must satisfy the closed-form system and have zero gradient."""
    assert fit.converged
    res = fixed_point_residuals(fit, data)
    assert max(abs(r) for r in res) < 1e-8, f"fixed-point residuals {res}"
    grad = fd_gradient(fit.theta, data)
    assert float(np.max(np.abs(grad))) < 1e-4, f"gradient {grad}"
