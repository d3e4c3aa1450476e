"""Empirical probes: unbiasedness, embedding, invertibility fit, widths."""

import math

import numpy as np
import pytest

from onebitcs import (
    InvalidArgumentError,
    RaicProbeConfig,
    SamplingExhaustedError,
    check_embedding,
    check_unbiasedness,
    decomposition_check,
    gaussian_width_estimate,
    gen_gaussian_matrix,
    gen_sparse_signal,
    normalize,
    projection_inequality_check,
    raic_level_sweep,
    raic_probe,
    sparse_dual_norm,
)
from onebitcs.probes import embedding_gap
from onebitcs.rng import generator_for
from oracles import chi_mean


class TestUnbiasedness:
    def test_scalar_identity(self):
        # in dimension one the estimator averages sqrt(pi/2)|g|, whose mean is 1
        dev = check_unbiasedness(np.array([1.0]), m=20_000, trials=5, seed=8)
        assert dev <= 0.02

    def test_sparse_vector_small_run(self):
        y = gen_sparse_signal(51, 32, 4)
        dev = check_unbiasedness(y.values, m=10_000, trials=10, seed=52)
        assert dev <= 4.0 * math.sqrt(math.pi / 2.0 / 1e5) * 2.0

    def test_measurement_budget_guard(self):
        with pytest.raises(InvalidArgumentError):
            check_unbiasedness(np.array([1.0]), m=10, trials=10, seed=1)

    def test_non_unit_rejected(self):
        with pytest.raises(InvalidArgumentError):
            check_unbiasedness(np.array([2.0]), m=20_000, trials=1, seed=1)


class TestEmbedding:
    def test_equal_pair_gap_zero(self):
        A = gen_gaussian_matrix(1, 64, 16)
        x = gen_sparse_signal(2, 16, 3)
        # hamming part is exactly 0; the geodesic part carries arccos rounding
        assert embedding_gap(A, x, x) <= 1e-7

    def test_antipodal_pair_gap_zero(self):
        A = gen_gaussian_matrix(3, 64, 16)
        x = gen_sparse_signal(4, 16, 3)
        assert embedding_gap(A, x.values, -x.values) <= 1e-7

    def test_random_pairs_small(self):
        assert check_embedding(N=32, s=3, m=2_000, pairs=25, seed=61) <= 0.08

    def test_pairs_guard(self):
        with pytest.raises(InvalidArgumentError):
            check_embedding(N=8, s=2, m=16, pairs=0, seed=1)


class TestRaicProbe:
    def test_reproducible_per_sample(self):
        cfg = RaicProbeConfig(N=64, s=4, m=512, samples=20, seed=5)
        assert raic_probe(cfg).per_sample == raic_probe(cfg).per_sample

    def test_distances_inside_annulus(self):
        cfg = RaicProbeConfig(N=64, s=4, m=512, samples=30, seed=6, r_lb=0.2, r_ub=0.6)
        res = raic_probe(cfg)
        assert all(0.2 - 1e-9 <= d <= 0.6 + 1e-9 for d, _ in res.per_sample)

    def test_diagnostic_endpoint_y_equals_x(self):
        cfg = RaicProbeConfig(N=64, s=4, m=512, samples=4, seed=3, r_lb=0.0, r_ub=0.0)
        res = raic_probe(cfg)
        assert all(lhs == 0.0 for _, lhs in res.per_sample)
        assert res.fitted_eta == 0.0 and res.fitted_delta == 0.0

    def test_near_coincident_lhs_tracks_distance(self):
        # equal sign patterns leave lhs = dual norm of (x - y), which is the
        # full norm of the 2s-sparse difference
        x = gen_sparse_signal(9, 32, 3).values
        y = x.copy()
        nz = np.flatnonzero(x)[0]
        y[nz] += 1e-8
        y = y / np.linalg.norm(y)
        A = gen_gaussian_matrix(10, 256, 32)
        sx = np.where(A.matrix @ x > 0, 1.0, -1.0)
        sy = np.where(A.matrix @ y > 0, 1.0, -1.0)
        assert np.array_equal(sx, sy)
        nu = math.sqrt(math.pi / 2) / 256
        lhs = sparse_dual_norm(nu * (A.matrix.T @ (sx - sy)) - (x - y), 3)
        dist = float(np.linalg.norm(x - y))
        assert lhs <= dist + 1e-15
        assert lhs == pytest.approx(dist, rel=1e-12)

    def test_contraction_compatible_fit_at_probe_scale(self):
        cfg = RaicProbeConfig(N=128, s=4, m=4096, samples=80, seed=7, r_lb=0.1, r_ub=0.5)
        res = raic_probe(cfg)
        assert 0.0 <= res.fitted_delta < 1.0
        assert res.fitted_eta >= 0.0

    def test_sampling_exhaustion_on_impossible_annulus(self):
        # s = 1 sparse unit vectors sit at distances {0, sqrt(2), 2} only
        cfg = RaicProbeConfig(N=8, s=1, m=16, samples=1, seed=1, r_lb=0.3, r_ub=0.4, retry_budget=200)
        with pytest.raises(SamplingExhaustedError):
            raic_probe(cfg)

    def test_level_sweep_runs_per_annulus(self):
        results = raic_level_sweep(
            N=32, s=3, m=256, annuli=[(0.1, 0.3), (0.3, 0.6)], samples=10, seed=11
        )
        assert len(results) == 2
        assert all(0.1 - 1e-9 <= d <= 0.3 + 1e-9 for d, _ in results[0].per_sample)
        assert all(0.3 - 1e-9 <= d <= 0.6 + 1e-9 for d, _ in results[1].per_sample)

    def test_invalid_annulus(self):
        with pytest.raises(InvalidArgumentError):
            RaicProbeConfig(N=8, s=2, m=16, samples=1, seed=1, r_lb=0.5, r_ub=0.4)


class TestDecomposition:
    def test_random_triples_residuals_tiny(self):
        rng = generator_for(41)
        for _ in range(300):
            x = normalize(rng.standard_normal(12))
            y = normalize(rng.standard_normal(12))
            a = rng.standard_normal(12)
            assert max(decomposition_check(a, x, y)) <= 1e-10

    def test_a_in_difference_direction(self):
        x = np.array([1.0, 0.0])
        y = np.array([0.0, 1.0])
        u = (x - y) / np.linalg.norm(x - y)
        recon, bu, bv = decomposition_check(u, x, y)
        assert recon <= 1e-12 and bu <= 1e-12 and bv <= 1e-12

    def test_orthogonal_pair_with_a_equal_x(self):
        x = np.array([1.0, 0.0])
        y = np.array([0.0, 1.0])
        a = x
        u = (x - y) / np.linalg.norm(x - y)
        v = (x + y) / np.linalg.norm(x + y)
        assert np.dot(a, u) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert np.dot(a, v) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert max(decomposition_check(a, x, y)) <= 1e-12

    def test_coincident_rejected(self):
        x = np.array([1.0, 0.0])
        with pytest.raises(InvalidArgumentError):
            decomposition_check(np.ones(2), x, x)
        with pytest.raises(InvalidArgumentError):
            decomposition_check(np.ones(2), x, -x)

    def test_non_unit_rejected(self):
        with pytest.raises(InvalidArgumentError):
            decomposition_check(np.ones(2), np.array([2.0, 0.0]), np.array([0.0, 1.0]))


class TestGaussianWidth:
    def test_full_space_matches_chi_mean(self):
        est = gaussian_width_estimate(16, 8, trials=10_000, seed=5)
        assert abs(est - chi_mean(16)) / chi_mean(16) <= 0.03

    def test_scalar_case(self):
        est = gaussian_width_estimate(1, 1, trials=10_000, seed=6)
        ref = math.sqrt(2.0 / math.pi)
        assert abs(est - ref) / ref <= 0.02

    def test_sparse_regime_ratio(self):
        # ratio to sqrt(2 s log(N/s)) stays near 1; 1.5 covers the constant
        est = gaussian_width_estimate(1024, 5, trials=2_000, seed=7)
        ref = math.sqrt(2 * 5 * math.log(1024 / 5))
        assert est <= 1.5 * ref
        assert est >= 0.8 * ref

    def test_trials_guard(self):
        with pytest.raises(InvalidArgumentError):
            gaussian_width_estimate(8, 2, trials=50, seed=1)


class TestProjectionInequality:
    def test_identical_w_and_z(self):
        rng = generator_for(3)
        z = normalize(rng.standard_normal(8))
        from onebitcs import hard_threshold

        z = hard_threshold(z, 8)
        assert np.linalg.norm(hard_threshold(z, 8) - z) == 0.0

    def test_search_finds_no_violation(self):
        assert projection_inequality_check(2_000, 32, 3, seed=31) <= 1e-10

    def test_disjoint_support_huge_w(self):
        z = np.zeros(16)
        z[:3] = normalize(np.array([1.0, -2.0, 0.5]))
        w = np.zeros(16)
        w[8:11] = 1e6 * np.array([1.0, 2.0, -1.0])
        from onebitcs import hard_threshold

        lhs = float(np.linalg.norm(hard_threshold(w, 3) - z))
        assert lhs <= 2.0 * sparse_dual_norm(w - z, 3) + 1e-10

    def test_samples_guard(self):
        with pytest.raises(InvalidArgumentError):
            projection_inequality_check(0, 8, 2, seed=1)
