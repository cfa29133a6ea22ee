import numpy as np
import pytest

from rosdos.numerics import random_orthogonal
from rosdos.shrinkage import (
    DegenerateShrinkageError,
    ShrinkageError,
    eoptshrink,
    estimate_bulk_edge,
    estimate_effective_rank,
    impute_noise_eigs,
    shrink_singular_value,
    stieltjes_estimates,
)

EDGE_COEF = 1.0 / (2.0 ** (2.0 / 3.0) - 1.0)


def noise_spectrum(p, n, seed):
    """Eigenvalues of Z Z^T for i.i.d. N(0, 1/n) entries, descending."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((p, n)) / np.sqrt(n)
    return np.sort(np.linalg.eigvalsh(Z @ Z.T))[::-1], Z


class TestBulkEdge:
    def test_direct_formula(self):
        spectrum = [10.0, 5.0, 3.0, 2.5, 2.0, 1.5, 1.0, 0.5]
        # n=16 -> m=2: edge = lam_3 + (lam_3 - lam_5) * coef
        assert estimate_bulk_edge(spectrum, 16) == pytest.approx(
            3.0 + EDGE_COEF * 1.0, rel=1e-12
        )
        assert estimate_bulk_edge(spectrum, 16) == pytest.approx(4.7024, abs=1e-4)

    def test_flat_spectrum(self):
        assert estimate_bulk_edge([2.0] * 10, 16) == pytest.approx(2.0)

    def test_too_short(self):
        with pytest.raises(ShrinkageError):
            estimate_bulk_edge([3.0, 2.0, 1.0], 16)

    def test_marchenko_pastur_edge(self):
        # i.i.d. noise, p=200, n=1000: edge should approach (1+sqrt(0.2))^2
        target = (1.0 + np.sqrt(0.2)) ** 2
        edges = []
        for seed in range(50):
            spectrum, _ = noise_spectrum(200, 1000, seed)
            edges.append(estimate_bulk_edge(spectrum, 1000))
        assert abs(np.median(edges) - target) / target < 0.05


class TestEffectiveRank:
    def test_direct(self):
        spectrum = [10.0, 5.0, 3.0]
        edge = 4.7024
        # threshold = 4.7024 + 16^(-1/3) = 5.0993 -> only 10 exceeds it
        assert estimate_effective_rank(spectrum, edge, 16) == 1

    def test_pure_noise_rank_zero(self):
        hits = 0
        for seed in range(30):
            spectrum, _ = noise_spectrum(200, 1000, seed)
            edge = estimate_bulk_edge(spectrum, 1000)
            hits += estimate_effective_rank(spectrum, edge, 1000) == 0
        assert hits >= 29

    def test_spiked_rank_three(self):
        hits = 0
        for seed in range(30):
            spectrum, Z = noise_spectrum(200, 1000, seed)
            edge_scale = np.sqrt(estimate_bulk_edge(spectrum, 1000))
            U = random_orthogonal(200, seed)[:, :3]
            V = random_orthogonal(1000, 1000 + seed)[:, :3]
            X = U @ np.diag(edge_scale * np.array([8.0, 7.0, 6.0])) @ V.T + Z
            lam = np.sort(np.linalg.eigvalsh(X @ X.T))[::-1]
            edge = estimate_bulk_edge(lam, 1000)
            hits += estimate_effective_rank(lam, edge, 1000) == 3
        assert hits >= 29


class TestImputeNoiseEigs:
    def test_direct_formula(self):
        spectrum = [9.0, 8.0, 3.0, 2.5, 2.0]
        out = impute_noise_eigs(spectrum, 2)
        assert out[0] == pytest.approx(3.0 + EDGE_COEF * 1.0, rel=1e-12)
        assert out[1] == pytest.approx(3.0 + (1 - 0.5 ** (2 / 3)) * EDGE_COEF, rel=1e-4)
        assert out[1] == pytest.approx(3.6299, abs=1e-4)

    def test_flat_spectrum(self):
        out = impute_noise_eigs([4.0] * 9, 3)
        assert np.allclose(out, 4.0)

    def test_j1_matches_bulk_edge(self):
        # with n = k^4 the bulk-edge order statistic m equals k
        rng = np.random.default_rng(8)
        spectrum = np.sort(rng.uniform(1.0, 5.0, 20))[::-1]
        k = 3
        out = impute_noise_eigs(spectrum, k)
        assert out[0] == pytest.approx(estimate_bulk_edge(spectrum, k ** 4))

    def test_nonincreasing_and_bounded_below(self):
        rng = np.random.default_rng(9)
        spectrum = np.sort(rng.uniform(0.0, 3.0, 30))[::-1]
        out = impute_noise_eigs(spectrum, 10)
        assert np.all(np.diff(out) <= 1e-12)
        assert np.all(out >= spectrum[10] - 1e-12)

    def test_too_short(self):
        with pytest.raises(ShrinkageError):
            impute_noise_eigs([3.0, 2.0, 1.0], 2)


class TestStieltjes:
    # frozen worked example: spectrum (9, 1, 0.5), k=1, beta=0.5, i=0
    def example(self):
        spectrum = np.array([9.0, 1.0, 0.5])
        imputed = impute_noise_eigs(spectrum, 1)
        return spectrum, imputed

    def test_worked_example(self):
        spectrum, imputed = self.example()
        est = stieltjes_estimates(spectrum, imputed, 0, 0.5)
        assert est.m1 == pytest.approx(-0.12751, abs=1e-5)
        assert est.m2 == pytest.approx(-0.11931, abs=1e-5)
        assert est.T == pytest.approx(0.13692, abs=1e-5)
        assert est.Tp == pytest.approx(-0.01880, abs=1e-5)

    def test_beta_zero_limit(self):
        spectrum, imputed = self.example()
        est = stieltjes_estimates(spectrum, imputed, 0, 0.0)
        assert est.m2 == pytest.approx(-1.0 / 9.0)

    def test_m1_negative(self):
        spectrum, imputed = self.example()
        for beta in [0.1, 0.5, 0.9]:
            assert stieltjes_estimates(spectrum, imputed, 0, beta).m1 < 0

    def test_kept_component_signs(self):
        spectrum, imputed = self.example()
        est = stieltjes_estimates(spectrum, imputed, 0, 0.5)
        assert est.m1 < 0 and est.m2 < 0 and est.T > 0 and est.Tp < 0

    def test_unseparated_component_rejected(self):
        spectrum = np.array([9.0, 1.0, 0.5])
        imputed = impute_noise_eigs(spectrum, 1)
        with pytest.raises(DegenerateShrinkageError):
            stieltjes_estimates(spectrum, imputed, 1, 0.5)


class TestShrink:
    def test_worked_example(self):
        spectrum = np.array([9.0, 1.0, 0.5])
        imputed = impute_noise_eigs(spectrum, 1)
        est = stieltjes_estimates(spectrum, imputed, 0, 0.5)
        d = shrink_singular_value(9.0, est)
        assert d == pytest.approx(2.428, abs=1e-3)
        assert d < 3.0  # never amplifies: d < sigma = sqrt(9)

    def test_white_noise_closed_form(self):
        # i.i.d. noise of variance 1/n: compare against the known optimal
        # Frobenius shrinker (1/y) sqrt((y^2 - beta - 1)^2 - 4 beta)
        beta = 0.2
        p, n = 200, 1000
        for y_factor in [2.0, 3.5]:
            rel_errs = []
            for seed in range(5):
                _, Z = noise_spectrum(p, n, seed)
                y = y_factor * (1.0 + np.sqrt(beta))
                d2 = ((y ** 2 - 1 - beta) + np.sqrt((y ** 2 - 1 - beta) ** 2 - 4 * beta)) / 2
                u = np.zeros(p)
                u[0] = 1.0
                v = np.zeros(n)
                v[0] = 1.0
                out = eoptshrink(np.sqrt(d2) * np.outer(u, v) + Z)
                y_obs = np.sqrt(out.spectrum[0])
                closed = np.sqrt((y_obs ** 2 - beta - 1) ** 2 - 4 * beta) / y_obs
                rel_errs.append(abs(out.shrunk[0] - closed) / closed)
            assert np.median(rel_errs) < 0.05

    def test_large_spike_ratio_to_one(self):
        # fixed bulk, growing spike: d / sigma increases toward 1
        rng = np.random.default_rng(10)
        bulk = np.sort(rng.uniform(0.5, 1.0, 100))[::-1]
        ratios = []
        for lam in [1e2, 1e3, 1e4, 1e5, 1e6]:
            spectrum = np.concatenate([[lam], bulk])
            imputed = impute_noise_eigs(spectrum, 10)
            est = stieltjes_estimates(spectrum, imputed, 0, 0.5)
            ratios.append(shrink_singular_value(lam, est) / np.sqrt(lam))
        assert np.all(np.diff(ratios) > 0)
        assert ratios[-1] == pytest.approx(1.0, abs=1e-3)


class TestEoptShrink:
    def spiked(self, seed=0, p=60, n=300, sv=(8.0, 6.0, 4.0)):
        rng = np.random.default_rng(seed)
        Z = rng.standard_normal((p, n)) / np.sqrt(n)
        U = random_orthogonal(p, seed + 1)[:, : len(sv)]
        V = random_orthogonal(n, seed + 2)[:, : len(sv)]
        return U @ np.diag(sv) @ V.T + Z

    def test_zero_matrix(self):
        with pytest.warns(RuntimeWarning):
            out = eoptshrink(np.zeros((40, 100)))
        assert out.effective_rank == 0
        assert np.all(out.denoised == 0.0)

    def test_scale_equivariance(self):
        X = self.spiked()
        o1 = eoptshrink(X)
        o2 = eoptshrink(3.7 * X)
        assert o1.effective_rank == o2.effective_rank
        assert np.linalg.norm(o2.denoised - 3.7 * o1.denoised) < 1e-8 * np.linalg.norm(
            o1.denoised
        )

    def test_rotation_equivariance(self):
        X = self.spiked(seed=3)
        Q = random_orthogonal(X.shape[0], 99)
        o1 = eoptshrink(X)
        o2 = eoptshrink(Q @ X)
        assert np.linalg.norm(o2.denoised - Q @ o1.denoised) < 1e-6 * np.linalg.norm(
            o1.denoised
        )

    def test_shrunk_below_singular(self):
        out = eoptshrink(self.spiked(seed=4))
        sigma = np.sqrt(out.spectrum[out.kept])
        assert np.all(out.shrunk > 0)
        assert np.all(out.shrunk < sigma)

    def test_transpose_handling(self):
        X = self.spiked(seed=5, p=60, n=300)
        out_t = eoptshrink(X.T)
        assert out_t.transposed
        out = eoptshrink(X)
        assert np.allclose(out_t.denoised, out.denoised.T, atol=1e-10)

    def test_noiseless_low_rank_recovery(self):
        # clean rank-3 input: detected rank 3 and values within 2%
        sv = (10.0, 5.0, 2.0)
        rng = np.random.default_rng(6)
        U = random_orthogonal(200, 7)[:, :3]
        V = random_orthogonal(1000, 8)[:, :3]
        out = eoptshrink(U @ np.diag(sv) @ V.T)
        assert out.effective_rank == 3
        assert np.allclose(out.shrunk, sv, rtol=0.02)

    def test_rank_auto_adjusts_k(self):
        sv = np.linspace(12.0, 8.0, 5)
        U = random_orthogonal(100, 1)[:, :5]
        V = random_orthogonal(2000, 2)[:, :5]
        rng = np.random.default_rng(3)
        X = U @ np.diag(sv) @ V.T + rng.standard_normal((100, 2000)) / np.sqrt(2000)
        with pytest.warns(RuntimeWarning):
            out = eoptshrink(X, k=3)
        assert out.effective_rank == 5
        assert out.imputed.size == 10

    def test_beats_oracle_tsvd_on_separable_noise(self):
        from rosdos.evaluation import baseline_tsvd
        from rosdos.synth import separable_noise

        p, n = 200, 1000
        err_shrink, err_tsvd = [], []
        for trial in range(5):
            Xi, _, _ = separable_noise(p, n, trial)
            Z = Xi / np.sqrt(n)
            edge = np.sqrt(eoptshrink(Z).bulk_edge)
            U = random_orthogonal(p, trial)[:, :3]
            V = random_orthogonal(n, 1000 + trial)[:, :3]
            S = U @ np.diag(edge * np.array([4.5, 3.6, 3.0])) @ V.T
            X = S + Z
            err_shrink.append(np.linalg.norm(eoptshrink(X).denoised - S))
            err_tsvd.append(np.linalg.norm(baseline_tsvd(X, 3) - S))
        assert np.mean(err_shrink) <= np.mean(err_tsvd)

    def test_too_small_rejected(self):
        with pytest.raises(ShrinkageError):
            eoptshrink(np.ones((5, 30)))
