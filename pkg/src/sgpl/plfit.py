"""Pairwise-likelihood estimation for the bivariate-Gaussian error model.

Each selected pair (i, l) contributes a bivariate normal log density for
the residuals (e_i, e_l) with common marginal variance sigma^2 and
within-pair correlation lambda:

    log f = -log(2*pi) - log(sigma^2) - 0.5*log(1 - lambda^2)
            - (e_i^2 - 2*lambda*e_i*e_l + e_l^2) / (2*sigma^2*(1 - lambda^2))

with e = y - x*beta.  The maximizer of the summed objective solves three
closed-form equations in the six pair-level sums alpha1..alpha6; the
estimator cycles beta -> sigma^2 -> lambda until the parameters stop
moving.  All operations here are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericalError",
    "PairData",
    "SufficientStats",
    "FitOptions",
    "PLFit",
    "pair_loglik",
    "total_loglik",
    "sufficient_stats",
    "fit_pl",
    "fixed_point_residuals",
]

LOG_2PI = math.log(2.0 * math.pi)


def _ordered_sum(v: np.ndarray) -> float:
    # Sort before summing: the reduction depends only on the multiset of
    # contributions, so permuting pairs or swapping (i, l) roles inside a
    # pair reproduces every statistic bit for bit.
    return float(np.sum(np.sort(v)))


class NumericalError(RuntimeError):
    """Estimation failed for numerical reasons (degenerate inputs, not bad usage)."""


@dataclass(frozen=True)
class PairData:
    """Regressor/response values of q observation pairs (column per role)."""

    x_i: np.ndarray
    x_l: np.ndarray
    y_i: np.ndarray
    y_l: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("x_i", "x_l", "y_i", "y_l"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, a)
            arrays[name] = a
        q = arrays["x_i"].shape[0] if arrays["x_i"].ndim == 1 else -1
        for name, a in arrays.items():
            if a.ndim != 1 or a.shape[0] != q:
                raise ValueError("pair arrays must be 1-D and share a common length")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite values")
        if q < 1:
            raise ValueError("need at least one pair")

    @property
    def q(self) -> int:
        return self.x_i.shape[0]


@dataclass(frozen=True)
class SufficientStats:
    """The six pair-level sums the closed-form updates run on."""

    alpha1: float  # sum of x_i^2 + x_l^2
    alpha2: float  # sum of y_i^2 + y_l^2
    alpha3: float  # sum of x_i*y_i + x_l*y_l
    alpha4: float  # sum of x_i*y_l + x_l*y_i
    alpha5: float  # sum of x_i*x_l
    alpha6: float  # sum of y_i*y_l
    q: int


@dataclass(frozen=True)
class FitOptions:
    """Iteration controls.

    tol is the max absolute parameter change that counts as converged
    (sigma^2 measured relatively, since its scale can dwarf beta and
    lambda by many orders of magnitude).  lambda_clamp keeps the density
    defined when perfectly correlated residuals push lambda toward 1.
    """

    tol: float = 1e-10
    max_iter: int = 200
    lambda_clamp: float = 0.9999

    def __post_init__(self) -> None:
        if not (self.tol > 0.0):
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (0.0 < self.lambda_clamp < 1.0):
            raise ValueError(f"lambda_clamp must lie in (0, 1), got {self.lambda_clamp}")


@dataclass(frozen=True)
class PLFit:
    """Result of a pairwise-likelihood fit."""

    beta: float
    sigma2: float
    lam: float
    iterations: int
    converged: bool
    loglik: float

    @property
    def theta(self) -> tuple[float, float, float]:
        return (self.beta, self.sigma2, self.lam)


def _check_theta(sigma2: float, lam: float) -> None:
    if not (sigma2 > 0.0):
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if not (abs(lam) < 1.0):
        raise ValueError(f"lambda must lie strictly inside (-1, 1), got {lam}")


def pair_loglik(
    theta: tuple[float, float, float], xi: float, xl: float, yi: float, yl: float
) -> float:
    """Log density contribution of a single pair at theta = (beta, sigma2, lambda)."""
    beta, sigma2, lam = theta
    _check_theta(sigma2, lam)
    ei = yi - xi * beta
    el = yl - xl * beta
    quad = ei * ei - 2.0 * lam * ei * el + el * el
    return -LOG_2PI - math.log(sigma2) - 0.5 * math.log1p(-lam * lam) - quad / (
        2.0 * sigma2 * (1.0 - lam * lam)
    )


def total_loglik(theta: tuple[float, float, float], data: PairData) -> float:
    """Summed pair log likelihood over all q pairs."""
    beta, sigma2, lam = theta
    _check_theta(sigma2, lam)
    ei = data.y_i - data.x_i * beta
    el = data.y_l - data.x_l * beta
    quad = _ordered_sum(np.concatenate([ei * ei, el * el])) - 2.0 * lam * _ordered_sum(ei * el)
    q = data.q
    return float(
        -q * (LOG_2PI + math.log(sigma2) + 0.5 * math.log1p(-lam * lam))
        - quad / (2.0 * sigma2 * (1.0 - lam * lam))
    )


def sufficient_stats(data: PairData) -> SufficientStats:
    """The six alpha sums over the pair set.

    Contributions are accumulated in sorted order, which keeps the sums
    accurate at large q and large magnitudes (squared six-figure
    responses) and makes each statistic independent of pair order and of
    the (i, l) orientation inside a pair.
    """
    xi, xl, yi, yl = data.x_i, data.x_l, data.y_i, data.y_l
    return SufficientStats(
        alpha1=_ordered_sum(np.concatenate([xi * xi, xl * xl])),
        alpha2=_ordered_sum(np.concatenate([yi * yi, yl * yl])),
        alpha3=_ordered_sum(np.concatenate([xi * yi, xl * yl])),
        alpha4=_ordered_sum(np.concatenate([xi * yl, xl * yi])),
        alpha5=_ordered_sum(xi * xl),
        alpha6=_ordered_sum(yi * yl),
        q=data.q,
    )


def _residual_sums_direct(data: PairData, beta: float) -> tuple[float, float]:
    ei = data.y_i - beta * data.x_i
    el = data.y_l - beta * data.x_l
    see = _ordered_sum(np.concatenate([ei * ei, el * el]))
    sel = _ordered_sum(ei * el)
    return see, sel


def _residual_sums_moment(stats: SufficientStats, beta: float) -> tuple[float, float]:
    see = stats.alpha2 - 2.0 * beta * stats.alpha3 + beta * beta * stats.alpha1
    sel = stats.alpha6 - beta * stats.alpha4 + beta * beta * stats.alpha5
    return see, sel


def _update_cycle(
    data: PairData, stats: SufficientStats, lam: float, direct: bool
) -> tuple[float, float, float]:
    """One cycle of the closed-form updates starting from the given lambda.

    The sigma^2 and lambda updates need the residual sums sum(e_i^2+e_l^2)
    and sum(e_i*e_l) at the new beta.  The moment route gets them from the
    alpha statistics in O(1); the direct route substitutes e = y - x*beta
    and sums over pairs, which costs O(q) but survives the catastrophic
    cancellation the moment expression hits when residuals are tiny
    relative to the responses.  Both are the same closed forms.
    """
    a1, a3, a4, a5 = stats.alpha1, stats.alpha3, stats.alpha4, stats.alpha5
    q = stats.q

    denom = a1 - 2.0 * lam * a5
    if abs(denom) <= 1e-12:
        raise NumericalError(
            "degenerate regressor configuration: alpha1 - 2*lambda*alpha5 is numerically zero"
        )
    beta = (a3 - lam * a4) / denom

    see, sel = (
        _residual_sums_direct(data, beta) if direct else _residual_sums_moment(stats, beta)
    )
    sigma2 = (see - 2.0 * lam * sel) / (2.0 * q * (1.0 - lam * lam))
    if not (sigma2 > 0.0) and not direct:
        # Moment-form cancellation can undershoot; retry this cycle exactly.
        see, sel = _residual_sums_direct(data, beta)
        sigma2 = (see - 2.0 * lam * sel) / (2.0 * q * (1.0 - lam * lam))
    if not (sigma2 > 0.0):
        raise NumericalError(f"degenerate residual variance: sigma2 update gave {sigma2}")

    lam_new = sel / (q * sigma2)
    return beta, sigma2, lam_new


def fit_pl(data: PairData, opts: FitOptions = FitOptions()) -> PLFit:
    """Iterate the three closed-form updates from lambda = 0 to a fixed point.

    Per iteration: beta from the current lambda, sigma^2 from the new beta
    and current lambda, lambda from the new beta and new sigma^2, clamped
    to +-opts.lambda_clamp.  Non-convergence within max_iter returns the
    last iterate with converged=False rather than raising.
    """
    if data.q < 2:
        raise ValueError(f"need at least 2 pairs to fit, got q={data.q}")
    stats = sufficient_stats(data)
    if stats.alpha1 <= 0.0:
        raise NumericalError(
            "degenerate regressor configuration: x is identically zero across pairs"
        )

    lam = 0.0
    beta = math.inf
    sigma2 = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        beta_new, sigma2_new, lam_new = _update_cycle(data, stats, lam)
        lam_new = min(max(lam_new, -opts.lambda_clamp), opts.lambda_clamp)
        delta = max(
            abs(beta_new - beta),
            abs(sigma2_new - sigma2) / abs(sigma2_new),
            abs(lam_new - lam),
        )
        beta, sigma2, lam = beta_new, sigma2_new, lam_new
        if delta < opts.tol:
            converged = True
            break

    return PLFit(
        beta=beta,
        sigma2=sigma2,
        lam=lam,
        iterations=iterations,
        converged=converged,
        loglik=total_loglik((beta, sigma2, lam), data),
    )


def fixed_point_residuals(fit: PLFit, data: PairData) -> tuple[float, float, float]:
    """Left-minus-right residual of each closed-form equation at the fit.

    All three vanish (to solver tolerance) at a converged fit; useful for
    verifying fixed-point consistency.
    """
    s = sufficient_stats(data)
    beta, sigma2, lam = fit.beta, fit.sigma2, fit.lam
    r_beta = beta - (s.alpha3 - lam * s.alpha4) / (s.alpha1 - 2.0 * lam * s.alpha5)
    r_sigma2 = sigma2 - (
        s.alpha2
        + beta * beta * s.alpha1
        - 2.0 * beta * s.alpha3
        - 2.0 * lam * s.alpha6
        - 2.0 * lam * beta * beta * s.alpha5
        + 2.0 * lam * beta * s.alpha4
    ) / (2.0 * s.q * (1.0 - lam * lam))
    r_lam = lam - (s.alpha6 - beta * s.alpha4 + beta * beta * s.alpha5) / (s.q * sigma2)
    return (r_beta, r_sigma2, r_lam)
