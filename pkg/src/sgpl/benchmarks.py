"""Reference estimators used for benchmarking and cross-validation.

Two independent routes live here:

* an exact maximum-likelihood estimator for the spatial error model,
  profiling (beta, sigma^2) out of the likelihood and searching the
  spatial parameter with a dense log-determinant per evaluation -- the
  O(N^3)-per-step gold standard that the grid-sampled estimator is
  benchmarked against, capped at small N;
* a brute-force maximizer of the pairwise objective (grid plus coordinate
  refinement) that never touches the closed-form fixed-point updates, so
  the two implementations can check each other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from sgpl.dgp import WeightsMatrix
from sgpl.plfit import LOG_2PI, NumericalError, PairData

__all__ = [
    "MLFit",
    "DENSE_ML_CAP",
    "sem_profile_loglik",
    "fit_ml_sem",
    "maximize_pl_brute",
]

DENSE_ML_CAP = 3000
LAMBDA_SEARCH_BOUND = 0.999


@dataclass(frozen=True)
class MLFit:
    """Exact ML estimate of the spatial error model."""

    beta0: float
    beta1: float
    lambda_ml: float
    sigma2_ml: float
    loglik: float
    n_evals: int


def _as_dense_w(w: WeightsMatrix | np.ndarray) -> np.ndarray:
    if isinstance(w, WeightsMatrix):
        return w.to_dense()
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"weights matrix must be square, got shape {w.shape}")
    return w


def sem_profile_loglik(
    lam: float, w: WeightsMatrix | np.ndarray, x_mat: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Concentrated SEM log likelihood at a spatial parameter value.

    With A = I - lam*W, GLS-profiles beta and sigma^2 and returns
    (loglik, beta_gls, sigma2_gls) where

        loglik = -N/2 * log(2*pi*sigma2) + log|A| - N/2

    and log|A| comes from a dense LU factorization.  Dense work caps N at
    DENSE_ML_CAP; larger problems are refused outright.
    """
    w_dense = _as_dense_w(w)
    x_mat = np.asarray(x_mat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n = y.shape[0]
    if n > DENSE_ML_CAP:
        raise ValueError(
            f"dense ML benchmark is capped at N={DENSE_ML_CAP} (got N={n}); "
            "use the grid-sampled estimator for larger datasets"
        )
    if not (abs(lam) < 1.0):
        raise ValueError(f"|lambda| must be < 1, got {lam}")
    if x_mat.ndim != 2 or x_mat.shape[0] != n:
        raise ValueError(f"design matrix must be (N, p) with N={n}, got {x_mat.shape}")

    a = np.eye(n) - lam * w_dense
    xa = a @ x_mat
    ya = a @ y
    gram = xa.T @ xa
    try:
        beta = np.linalg.solve(gram, xa.T @ ya)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular GLS system at lambda={lam}") from exc
    resid = y - x_mat @ beta
    ae = a @ resid
    sigma2 = float(ae @ ae) / n
    # Exactly-linear responses leave only rounding residue (~eps^2 of the
    # response scale); treat anything in that regime as noiseless.
    if not (sigma2 > 1e-24 * max(float(np.mean(y * y)), 1e-300)):
        raise NumericalError(
            "residual variance collapsed to zero (noiseless response); ML fit undefined"
        )
    sign, logdet = np.linalg.slogdet(a)
    if sign <= 0:
        raise NumericalError(f"I - lambda*W is not positive-determinant at lambda={lam}")
    loglik = -0.5 * n * (LOG_2PI + math.log(sigma2)) + logdet - 0.5 * n
    return loglik, beta, sigma2


def fit_ml_sem(
    w: WeightsMatrix | np.ndarray, x_mat: np.ndarray, y: np.ndarray, grid_points: int = 21
) -> MLFit:
    """Maximize the concentrated SEM likelihood over lambda.

    A coarse grid scan locates the basin (and warns if the profile looks
    multimodal); Brent-style bounded refinement then pins lambda to 1e-6.
    """
    w_dense = _as_dense_w(w)
    x_mat = np.asarray(x_mat, dtype=np.float64)
    if x_mat.ndim != 2 or x_mat.shape[1] != 2:
        raise ValueError(f"expected a two-column design matrix [1, x], got {x_mat.shape}")
    n_evals = 0

    def objective(lam: float) -> float:
        nonlocal n_evals
        n_evals += 1
        return sem_profile_loglik(lam, w_dense, x_mat, y)[0]

    grid = np.linspace(-LAMBDA_SEARCH_BOUND, LAMBDA_SEARCH_BOUND, grid_points)
    values = np.asarray([objective(g) for g in grid])

    interior = np.flatnonzero(
        (values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])
    )
    if len(interior) > 1:
        peaks = values[interior + 1]
        if np.max(peaks) - np.min(peaks) > 1e-6:
            warnings.warn(
                "SEM profile likelihood looks multimodal over the lambda grid; "
                "reporting the best local maximum",
                RuntimeWarning,
                stacklevel=2,
            )

    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid_points - 1)]
    res = minimize_scalar(
        lambda lam: -objective(lam),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-6},
    )
    lam_hat = float(res.x)
    loglik, beta, sigma2 = sem_profile_loglik(lam_hat, w_dense, x_mat, y)
    return MLFit(
        beta0=float(beta[0]),
        beta1=float(beta[1]),
        lambda_ml=lam_hat,
        sigma2_ml=sigma2,
        loglik=loglik,
        n_evals=n_evals,
    )


# --- brute-force pairwise maximizer ------------------------------------

def _profiled_objective(data: PairData, beta: float, lam: float) -> float:
    """Pairwise log likelihood at (beta, lam) with sigma^2 at its conditional optimum.

    Direct summation over pairs; shares no code with the fixed-point
    estimator it is used to validate.
    """
    ei = data.y_i - beta * data.x_i
    el = data.y_l - beta * data.x_l
    s = float(np.sum(ei * ei + el * el) - 2.0 * lam * np.sum(ei * el))
    q = data.q
    sigma2 = s / (2.0 * q * (1.0 - lam * lam))
    if not (sigma2 > 0.0):
        return -math.inf
    # At the conditional optimum the quadratic term collapses to q.
    return -q * (LOG_2PI + math.log(sigma2) + 0.5 * math.log1p(-lam * lam)) - q


def _profiled_sigma2(data: PairData, beta: float, lam: float) -> float:
    ei = data.y_i - beta * data.x_i
    el = data.y_l - beta * data.x_l
    s = float(np.sum(ei * ei + el * el) - 2.0 * lam * np.sum(ei * el))
    return s / (2.0 * data.q * (1.0 - lam * lam))


def maximize_pl_brute(data: PairData) -> tuple[float, float, float]:
    """Maximize the pairwise objective by grid search plus coordinate refinement.

    Coarse (beta, lambda) grid with sigma^2 profiled in closed form, then
    alternating one-dimensional refinements until the argmax is pinned
    well inside 1e-5 per coordinate.  Returns (beta, sigma2, lambda).
    """
    if data.q < 2:
        raise ValueError(f"need at least 2 pairs, got q={data.q}")
    sxx = float(np.sum(data.x_i**2) + np.sum(data.x_l**2))
    if sxx <= 0.0:
        raise NumericalError(
            "degenerate regressor configuration: x is identically zero across pairs"
        )
    # Stacked-OLS center and a generous scale for the beta grid.
    sxy = float(np.sum(data.x_i * data.y_i) + np.sum(data.x_l * data.y_l))
    beta_center = sxy / sxx
    y_all = np.concatenate([data.y_i, data.y_l])
    x_all = np.concatenate([data.x_i, data.x_l])
    scale = max(float(np.std(y_all)) / max(float(np.std(x_all)), 1e-12), abs(beta_center), 1.0)

    betas = beta_center + np.linspace(-3.0, 3.0, 41) * scale
    lams = np.linspace(-0.98, 0.98, 41)
    best_val = -math.inf
    best_beta = beta_center
    best_lam = 0.0
    for b in betas:
        for g in lams:
            val = _profiled_objective(data, b, g)
            if val > best_val:
                best_val, best_beta, best_lam = val, float(b), float(g)

    beta_hw = max(scale * 0.2, 1e-6)
    lam_hw = 0.1
    beta_cur, lam_cur = best_beta, best_lam
    for _ in range(80):
        b_lo, b_hi = beta_cur - beta_hw, beta_cur + beta_hw
        res_b = minimize_scalar(
            lambda b: -_profiled_objective(data, b, lam_cur),
            bounds=(b_lo, b_hi),
            method="bounded",
            options={"xatol": 1e-11},
        )
        beta_new = float(res_b.x)
        at_b_edge = min(beta_new - b_lo, b_hi - beta_new) < 0.05 * beta_hw

        l_lo = max(lam_cur - lam_hw, -0.9999)
        l_hi = min(lam_cur + lam_hw, 0.9999)
        res_l = minimize_scalar(
            lambda g: -_profiled_objective(data, beta_new, g),
            bounds=(l_lo, l_hi),
            method="bounded",
            options={"xatol": 1e-11},
        )
        lam_new = float(res_l.x)
        at_l_edge = min(lam_new - l_lo, l_hi - lam_new) < 0.05 * lam_hw

        moved = max(abs(beta_new - beta_cur), abs(lam_new - lam_cur))
        beta_cur, lam_cur = beta_new, lam_new
        beta_hw = beta_hw * 2.0 if at_b_edge else max(beta_hw * 0.5, 1e-8)
        lam_hw = min(lam_hw * 2.0, 1.0) if at_l_edge else max(lam_hw * 0.5, 1e-8)
        if moved < 1e-9 and not (at_b_edge or at_l_edge):
            break

    sigma2 = _profiled_sigma2(data, beta_cur, lam_cur)
    if not (sigma2 > 0.0):
        raise NumericalError(f"degenerate residual variance: profiled sigma2 gave {sigma2}")
    return (beta_cur, sigma2, lam_cur)
