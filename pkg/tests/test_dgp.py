import numpy as np
import pytest
from scipy.spatial import cKDTree

from sgpl.dgp import (
    DGPSpec,
    PointSet,
    WeightsMatrix,
    gen_dataset,
    gen_points_clustered,
    gen_points_uniform,
    knn_weights,
    neumann_errors,
)


def knn_bruteforce(coords: np.ndarray, k_w: int) -> np.ndarray:
    # All-pairs distances, sorted with index tie-break, row-canonical order.
    n = coords.shape[0]
    out = np.empty((n, k_w), dtype=np.int64)
    for i in range(n):
        d = np.linalg.norm(coords - coords[i], axis=1)
        d[i] = np.inf
        order = np.lexsort((np.arange(n), d))
        out[i] = np.sort(order[:k_w])
    return out


class TestUniformPoints:
    def test_single_point_in_square(self):
        p = gen_points_uniform(1, np.random.default_rng(0))
        assert p.shape == (1, 2)
        assert np.all((p >= 0) & (p <= 1))

    def test_mean_near_half(self):
        p = gen_points_uniform(100_000, np.random.default_rng(1))
        assert abs(float(np.mean(p[:, 0])) - 0.5) < 0.01
        assert abs(float(np.mean(p[:, 1])) - 0.5) < 0.01

    def test_deterministic(self):
        a = gen_points_uniform(500, np.random.default_rng(9))
        b = gen_points_uniform(500, np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestClusteredPoints:
    def test_tiny_sigma_collapses_to_centroids(self):
        # With near-zero spread the points form tight, well separated
        # blobs; intra-blob spread stays far below 1e-6.
        p = gen_points_clustered(400, 5.0, 1e-9, np.random.default_rng(21))
        gaps = np.linalg.norm(np.diff(p, axis=0), axis=1)
        breaks = np.flatnonzero(gaps > 1e-3)
        blocks = np.split(np.arange(400), breaks + 1)
        assert len(blocks) >= 1
        for block in blocks:
            spread = np.linalg.norm(p[block] - p[block[0]], axis=1)
            assert float(spread.max()) < 1e-6

    def test_count_and_containment(self):
        p = gen_points_clustered(1000, 5.0, 0.05, np.random.default_rng(2))
        assert p.shape == (1000, 2)
        assert np.all((p >= 0) & (p <= 1))

    def test_clustering_reduces_nn_distance(self):
        wins = 0
        for seed in range(20):
            rng_c = np.random.default_rng(seed)
            rng_u = np.random.default_rng(seed + 1000)
            pc = gen_points_clustered(500, 5.0, 0.05, rng_c)
            pu = gen_points_uniform(500, rng_u)

            def mean_nn(pts):
                d, _ = cKDTree(pts).query(pts, k=2)
                return float(np.mean(d[:, 1]))

            if mean_nn(pc) < mean_nn(pu):
                wins += 1
        assert wins == 20

    def test_deterministic(self):
        a = gen_points_clustered(300, 5.0, 0.05, np.random.default_rng(3))
        b = gen_points_clustered(300, 5.0, 0.05, np.random.default_rng(3))
        assert np.array_equal(a, b)


class TestKnnWeights:
    def test_collinear_tie_breaks_to_lower_index(self):
        w = knn_weights(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]), 1)
        assert w.neighbors.ravel().tolist() == [1, 0, 1]

    def test_rows_sum_to_one_no_diagonal(self):
        rng = np.random.default_rng(4)
        w = knn_weights(rng.random((200, 2)), 4)
        dense = w.to_dense()
        assert np.max(np.abs(dense.sum(axis=1) - 1.0)) < 1e-12
        assert np.all(np.diag(dense) == 0.0)
        assert np.all((dense == 0.0) | (dense == 0.25))

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(5)
        coords = rng.random((500, 2))
        w = knn_weights(coords, 4)
        assert np.array_equal(w.neighbors, knn_bruteforce(coords, 4))

    def test_duplicate_points_are_nearest(self):
        coords = np.array([[0.5, 0.5], [0.5, 0.5], [0.9, 0.9]])
        w = knn_weights(coords, 1)
        assert w.neighbors.ravel().tolist() == [1, 0, 0]

    def test_n_too_small_rejected(self):
        with pytest.raises(ValueError):
            knn_weights(np.random.default_rng(0).random((4, 2)), 4)

    def test_matvec_matches_csr(self):
        rng = np.random.default_rng(6)
        w = knn_weights(rng.random((150, 2)), 3)
        v = rng.normal(size=150)
        assert np.allclose(w.matvec(v), w.to_csr() @ v, atol=1e-14)


class TestNeumannErrors:
    def test_lambda_zero_is_plain_noise(self):
        rng = np.random.default_rng(7)
        w = knn_weights(rng.random((100, 2)), 4)
        u = neumann_errors(w, 0.0, 0.1, 50, np.random.default_rng(8))
        eps = np.random.default_rng(8).normal(0.0, np.sqrt(0.1), 100)
        assert np.array_equal(u, eps)

    def test_single_term_expansion(self):
        rng = np.random.default_rng(9)
        w = knn_weights(rng.random((80, 2)), 4)
        u = neumann_errors(w, 0.4, 0.1, 1, np.random.default_rng(10))
        eps = np.random.default_rng(10).normal(0.0, np.sqrt(0.1), 80)
        assert np.allclose(u, eps + 0.4 * w.matvec(eps), atol=0.0, rtol=0.0)

    @pytest.mark.parametrize("lam", [-0.7, -0.3, 0.3, 0.7])
    def test_matches_dense_solve(self, lam):
        rng = np.random.default_rng(11)
        w = knn_weights(rng.random((200, 2)), 4)
        u = neumann_errors(w, lam, 0.1, 50, np.random.default_rng(12))
        eps = np.random.default_rng(12).normal(0.0, np.sqrt(0.1), 200)
        exact = np.linalg.solve(np.eye(200) - lam * w.to_dense(), eps)
        assert float(np.max(np.abs(u - exact))) < 1e-6


class TestGenDataset:
    def test_noiseless_response(self):
        spec = DGPSpec(n=200, pattern="uniform", lambda_sem=0.0, sigma_eps2=0.0, seed=13)
        pts = gen_dataset(spec)
        assert np.allclose(pts.y, 1.0 + 1.5 * pts.x, atol=0.0, rtol=0.0)

    def test_ols_recovers_slope(self):
        spec = DGPSpec(n=5000, pattern="uniform", lambda_sem=0.3, seed=14)
        pts = gen_dataset(spec)
        slope = np.polyfit(pts.x, pts.y, 1)[0]
        assert abs(slope - 1.5) < 0.05

    def test_deterministic(self):
        spec = DGPSpec(n=400, pattern="clustered", lambda_sem=0.5, seed=15)
        a, b = gen_dataset(spec), gen_dataset(spec)
        assert np.array_equal(a.coords, b.coords)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.y, b.y)

    def test_points_in_square(self):
        for pattern in ("uniform", "clustered"):
            spec = DGPSpec(n=500, pattern=pattern, lambda_sem=0.0, seed=16)
            pts = gen_dataset(spec)
            assert np.all((pts.coords >= 0.0) & (pts.coords <= 1.0))

    def test_positive_dependence_inflates_error_variance(self):
        vars_dep = []
        for seed in range(10):
            base = dict(n=400, pattern="uniform", sigma_eps2=0.1)
            dep = gen_dataset(DGPSpec(lambda_sem=0.7, seed=seed, **base))
            u = dep.y - (1.0 + 1.5 * dep.x)
            vars_dep.append(float(np.var(u)))
        assert float(np.mean(vars_dep)) > 0.1

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            DGPSpec(n=0, pattern="uniform", lambda_sem=0.0)
        with pytest.raises(ValueError):
            DGPSpec(n=10, pattern="hexes", lambda_sem=0.0)
        with pytest.raises(ValueError):
            DGPSpec(n=10, pattern="uniform", lambda_sem=1.0)

    def test_pointset_validation(self):
        with pytest.raises(ValueError):
            PointSet(coords=np.zeros((3, 2)), x=np.zeros(2), y=np.zeros(3))


class TestWeightsMatrix:
    def test_neumann_tail_bound_respected(self):
        # Truncation error is bounded by |lam|^(k+1)/(1-|lam|) * ||eps||_inf.
        rng = np.random.default_rng(17)
        w = knn_weights(rng.random((150, 2)), 4)
        lam = 0.7
        eps = np.random.default_rng(18).normal(0.0, np.sqrt(0.1), 150)
        exact = np.linalg.solve(np.eye(150) - lam * w.to_dense(), eps)
        for k in (10, 20, 50):
            u = neumann_errors(w, lam, 0.1, k, np.random.default_rng(18))
            bound = lam ** (k + 1) / (1 - lam) * float(np.max(np.abs(eps)))
            assert float(np.max(np.abs(u - exact))) <= bound * 1.01 + 1e-12

    def test_row_structure(self):
        w = WeightsMatrix(neighbors=np.array([[1, 2], [0, 2], [0, 1]]), k_w=2)
        dense = w.to_dense()
        assert dense.shape == (3, 3)
        assert np.allclose(dense.sum(axis=1), 1.0)
