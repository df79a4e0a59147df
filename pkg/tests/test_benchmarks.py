import numpy as np
import pytest

from conftest import make_pair_data
from sgpl.benchmarks import (
    DENSE_ML_CAP,
    MLFit,
    fit_ml_sem,
    maximize_pl_brute,
    sem_profile_loglik,
)
from sgpl.dgp import DGPSpec, gen_dataset, knn_weights
from sgpl.plfit import NumericalError, PairData, fit_pl


def design(pts):
    return np.column_stack([np.ones(pts.n), pts.x])


def dataset_with_weights(n, lambda_sem, seed, pattern="uniform"):
    spec = DGPSpec(n=n, pattern=pattern, lambda_sem=lambda_sem, seed=seed)
    pts = gen_dataset(spec)
    return pts, knn_weights(pts.coords, spec.k_w)


class TestSemProfileLoglik:
    def test_lambda_zero_reduces_to_ols(self):
        pts, w = dataset_with_weights(300, 0.4, seed=1)
        x_mat = design(pts)
        loglik, beta, sigma2 = sem_profile_loglik(0.0, w, x_mat, pts.y)
        beta_ols, *_ = np.linalg.lstsq(x_mat, pts.y, rcond=None)
        resid = pts.y - x_mat @ beta_ols
        assert np.allclose(beta, beta_ols, atol=1e-10)
        assert sigma2 == pytest.approx(float(resid @ resid) / 300, rel=1e-12)
        # log|I| term vanishes, so the loglik is the plain Gaussian one.
        n = 300
        expected = -0.5 * n * np.log(2 * np.pi * sigma2) - 0.5 * n
        assert loglik == pytest.approx(expected, rel=1e-12)

    def test_logdet_matches_eigenvalue_oracle(self):
        pts, w = dataset_with_weights(50, 0.3, seed=2)
        x_mat = design(pts)
        dense = w.to_dense()
        eigs = np.linalg.eigvals(dense)
        for lam in (-0.8, -0.2, 0.5, 0.9):
            ll, _, sigma2 = sem_profile_loglik(lam, w, x_mat, pts.y)
            logdet_oracle = float(np.sum(np.log(np.abs(1.0 - lam * eigs))))
            n = 50
            expected = -0.5 * n * np.log(2 * np.pi * sigma2) + logdet_oracle - 0.5 * n
            assert ll == pytest.approx(expected, rel=1e-10)

    def test_profile_below_maximum(self):
        pts, w = dataset_with_weights(200, 0.5, seed=3)
        x_mat = design(pts)
        fit = fit_ml_sem(w, x_mat, pts.y)
        at_true = sem_profile_loglik(0.5, w, x_mat, pts.y)[0]
        assert at_true <= fit.loglik + 1e-9
        for lam in np.linspace(-0.99, 0.99, 21):
            assert sem_profile_loglik(lam, w, x_mat, pts.y)[0] <= fit.loglik + 1e-9

    def test_n_over_cap_refused(self):
        n = DENSE_ML_CAP + 1
        w = np.zeros((2, 2))
        with pytest.raises(ValueError, match="capped"):
            sem_profile_loglik(0.0, w[:2, :2], np.ones((n, 2)), np.ones(n))


class TestFitMlSem:
    def test_recovers_zero_dependence(self):
        # Per-seed ML spread at n=500 has SD ~ 0.066 (one of these 20
        # seeds lands at -0.198), so individual estimates get a 3-sigma
        # band while the mean carries the tight recovery requirement.
        lams = []
        for seed in range(20):
            pts, w = dataset_with_weights(500, 0.0, seed=seed)
            fit = fit_ml_sem(w, design(pts), pts.y)
            lams.append(fit.lambda_ml)
            assert abs(fit.lambda_ml) < 0.25
        assert abs(float(np.mean(lams))) < 0.05

    def test_recovers_strong_dependence(self):
        lams = []
        for seed in range(20):
            pts, w = dataset_with_weights(1000, 0.7, seed=seed + 50)
            fit = fit_ml_sem(w, design(pts), pts.y)
            lams.append(fit.lambda_ml)
        assert abs(float(np.mean(lams)) - 0.7) < 0.1

    def test_loglik_beats_true_parameters(self):
        pts, w = dataset_with_weights(400, 0.3, seed=4)
        x_mat = design(pts)
        fit = fit_ml_sem(w, x_mat, pts.y)
        assert fit.loglik >= sem_profile_loglik(0.3, w, x_mat, pts.y)[0] - 1e-9
        assert isinstance(fit, MLFit)
        assert fit.n_evals > 20

    def test_noiseless_is_degenerate(self):
        pts, w = dataset_with_weights(100, 0.0, seed=5)
        y = design(pts) @ np.array([1.0, 1.5])
        with pytest.raises(NumericalError, match="variance"):
            fit_ml_sem(w, design(pts), y)

    def test_slope_recovery(self):
        pts, w = dataset_with_weights(800, 0.5, seed=6)
        fit = fit_ml_sem(w, design(pts), pts.y)
        assert abs(fit.beta1 - 1.5) < 0.05
        assert fit.sigma2_ml > 0.0


class TestMaximizePlBrute:
    def test_agrees_with_fixed_point(self):
        d = make_pair_data(200, 1.2, 1.5, 0.4, seed=7)
        fit = fit_pl(d)
        beta, sigma2, lam = maximize_pl_brute(d)
        assert abs(beta - fit.beta) < 1e-4
        assert abs(sigma2 - fit.sigma2) < 1e-4
        assert abs(lam - fit.lam) < 1e-4

    def test_zero_correlation_instance(self):
        d = make_pair_data(2000, 0.5, 1.0, 0.0, seed=8)
        _, _, lam = maximize_pl_brute(d)
        assert abs(lam) < 0.05

    def test_duplicated_pairs_same_argmax(self):
        d = make_pair_data(100, -1.0, 0.5, -0.3, seed=9)
        doubled = PairData(
            x_i=np.concatenate([d.x_i, d.x_i]),
            x_l=np.concatenate([d.x_l, d.x_l]),
            y_i=np.concatenate([d.y_i, d.y_i]),
            y_l=np.concatenate([d.y_l, d.y_l]),
        )
        a = maximize_pl_brute(d)
        b = maximize_pl_brute(doubled)
        for u, v in zip(a, b):
            assert abs(u - v) < 1e-5

    def test_zero_regressor_rejected(self):
        d = PairData(x_i=[0.0, 0.0], x_l=[0.0, 0.0], y_i=[1.0, 2.0], y_l=[0.5, 0.1])
        with pytest.raises(NumericalError):
            maximize_pl_brute(d)

    def test_q_one_rejected(self):
        with pytest.raises(ValueError):
            maximize_pl_brute(PairData(x_i=[1.0], x_l=[0.0], y_i=[1.0], y_l=[0.0]))
