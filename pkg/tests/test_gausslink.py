import math

import numpy as np
import pytest

from qgranger.gausslink import (
    GaussPair,
    binary_true_moments,
    midtread_cross_cov,
    midtread_true_moments,
    midtread_variance,
    quantized_cross_cov,
    quantized_cross_cov_grid,
    quantized_mean,
    quantized_true_moments,
    quantized_variance,
    std_normal_cdf,
    vanvleck_forward,
    vanvleck_invert,
)
from qgranger.quantize import BinaryQuantizer, FiniteQuantizer, UniformQuantizer, quantize_series

BIN = BinaryQuantizer(0.0)


def gaussian_pair_samples(rng, rho, s1, s2, n):
    cov = np.array([[s1 * s1, rho * s1 * s2], [rho * s1 * s2, s2 * s2]])
    return rng.standard_normal((n, 2)) @ np.linalg.cholesky(cov).T


class TestNormalCdf:
    def test_center(self):
        assert std_normal_cdf(0.0) == pytest.approx(0.5, abs=1e-16)

    def test_975_quantile(self):
        assert std_normal_cdf(1.959963985) == pytest.approx(0.975, abs=1e-10)

    def test_far_tail(self):
        assert std_normal_cdf(-8.0) < 1e-15

    def test_reflection(self):
        xs = np.linspace(-8, 8, 161)
        assert np.max(np.abs(std_normal_cdf(-xs) - (1.0 - std_normal_cdf(xs)))) <= 1e-15


class TestVanVleck:
    @pytest.mark.parametrize("gq,rho", [(0.0, 0.0), (1.0 / 3.0, 0.5), (2.0 / 3.0, math.sqrt(3) / 2)])
    def test_invert_values(self, gq, rho):
        assert vanvleck_invert(gq) == pytest.approx(rho, abs=1e-15)

    @pytest.mark.parametrize("rho,gq", [(1.0, 1.0), (0.5, 1.0 / 3.0), (-0.5, -1.0 / 3.0)])
    def test_forward_values(self, rho, gq):
        assert vanvleck_forward(rho) == pytest.approx(gq, abs=1e-15)

    def test_roundtrip(self):
        grid = np.linspace(-0.99, 0.99, 199)
        back = vanvleck_invert(vanvleck_forward(grid))
        assert np.max(np.abs(back - grid)) <= 1e-14

    def test_invert_rejects_impossible_covariance(self):
        with pytest.raises(ValueError, match="\\+/-1"):
            vanvleck_invert(1.2)


class TestPairIntegral:
    def test_binary_collapse(self):
        for rho in np.linspace(-0.99, 0.99, 41):
            got = quantized_cross_cov(GaussPair(rho, 1.0, 1.0), BIN, BIN)
            assert got == pytest.approx(vanvleck_forward(rho), abs=1e-10)

    def test_zero_correlation(self, twobit_specs):
        qx, qz = twobit_specs
        assert quantized_cross_cov(GaussPair(0.0, 1.0, 2.0), qx, qz) == 0.0

    def test_against_monte_carlo(self, twobit_specs):
        qx, qz = twobit_specs
        rng = np.random.default_rng(2024)
        n = 2_000_000
        w = gaussian_pair_samples(rng, 0.3, 1.0, 1.5, n)
        xq = quantize_series(w[:, 0], qx)
        zq = quantize_series(w[:, 1], qz)
        mc = np.mean(xq * zq) - np.mean(xq) * np.mean(zq)
        se = np.std(xq * zq) / np.sqrt(n)
        got = quantized_cross_cov(GaussPair(0.3, 1.0, 1.5), qx, qz)
        assert abs(got - mc) < 3 * se

    def test_antisymmetric_for_symmetric_specs(self):
        spec = FiniteQuantizer(thresholds=[-1.0, 0.0, 1.0], levels=[-3.0, -1.0, 1.0, 3.0])
        for rho in (0.15, 0.5, 0.95):
            plus = quantized_cross_cov(GaussPair(rho, 1.2, 0.8), spec, spec)
            minus = quantized_cross_cov(GaussPair(-rho, 1.2, 0.8), spec, spec)
            assert plus == pytest.approx(-minus, abs=1e-11)

    def test_monotone_in_rho(self, twobit_specs):
        qx, qz = twobit_specs
        grid = np.linspace(0.0, 0.999, 50)
        vals = quantized_cross_cov_grid(grid, 1.0, 1.3, qx, qz)
        assert np.all(np.diff(vals) > 0)

    def test_grid_matches_adaptive(self, twobit_specs):
        qx, qz = twobit_specs
        rng = np.random.default_rng(7)
        rho = rng.uniform(-0.99, 0.99, 25)
        s1 = rng.uniform(0.4, 3.0, 25)
        s2 = rng.uniform(0.4, 3.0, 25)
        grid = quantized_cross_cov_grid(rho, s1, s2, qx, qz)
        for r, a, b, g in zip(rho, s1, s2, grid):
            assert g == pytest.approx(
                quantized_cross_cov(GaussPair(r, a, b), qx, qz), abs=1e-10
            )

    def test_rho_cap_enforced(self, twobit_specs):
        qx, qz = twobit_specs
        with pytest.raises(ValueError, match="0.999"):
            quantized_cross_cov(GaussPair(0.9999, 1.0, 1.0), qx, qz)

    def test_uniform_spec_rejected(self):
        with pytest.raises(TypeError, match="binary or finite"):
            quantized_cross_cov(GaussPair(0.3, 1.0, 1.0), UniformQuantizer(0.5), BIN)


class TestIndependentRoutes:
    def test_pair_integral_against_cell_probability_oracle(self, twobit_specs):
        # E{Q1 Q2} - E{Q1}E{Q2} computed from bivariate normal rectangle
        # probabilities; an entirely different route than the rho-derivative
        # integral under test
        from scipy.stats import multivariate_normal

        qx, qz = twobit_specs

        def oracle(rho, s1, s2):
            cov = [[s1 * s1, rho * s1 * s2], [rho * s1 * s2, s2 * s2]]
            mvn = multivariate_normal(mean=[0.0, 0.0], cov=cov)
            big = 60.0
            cx = np.concatenate(([-big], qx.thresholds / 1.0, [big]))
            cz = np.concatenate(([-big], qz.thresholds / 1.0, [big]))
            e_joint = 0.0
            for i, li in enumerate(qx.levels):
                for j, lj in enumerate(qz.levels):
                    p = (
                        mvn.cdf([cx[i + 1], cz[j + 1]])
                        - mvn.cdf([cx[i], cz[j + 1]])
                        - mvn.cdf([cx[i + 1], cz[j]])
                        + mvn.cdf([cx[i], cz[j]])
                    )
                    e_joint += li * lj * p
            return e_joint - quantized_mean(s1, qx) * quantized_mean(s2, qz)

        for rho, s1, s2 in ((0.3, 1.0, 1.5), (-0.6, 2.0, 0.7), (0.85, 1.3, 1.3)):
            got = quantized_cross_cov(GaussPair(rho, s1, s2), qx, qz)
            assert got == pytest.approx(oracle(rho, s1, s2), abs=5e-7)

    def test_midtread_series_against_truncated_pair_integral(self):
        # a finite uniform quantizer covering +/- 8 sigma is numerically
        # indistinguishable from the infinite-level mid-tread quantizer, so
        # the theta-function series and the threshold-pair quadrature must
        # agree on the covariance
        rho, s1, s2, d1, d2 = 0.45, 1.0, 1.4, 0.7, 0.9

        def truncated(delta, sigma):
            half_cells = int(np.ceil(8 * sigma / delta))
            centers = delta * np.arange(-half_cells, half_cells + 1)
            return FiniteQuantizer(thresholds=centers[:-1] + delta / 2, levels=centers)

        qa = truncated(d1, s1)
        qb = truncated(d2, s2)
        series = midtread_cross_cov(rho, s1, s2, d1, d2)
        quad = quantized_cross_cov(GaussPair(rho, s1, s2), qa, qb, tol=1e-12)
        assert series == pytest.approx(quad, abs=1e-9)

    def test_midtread_variance_against_truncated_cells(self):
        sigma, delta = 1.4, 0.9
        half_cells = int(np.ceil(8 * sigma / delta))
        centers = delta * np.arange(-half_cells, half_cells + 1)
        spec = FiniteQuantizer(thresholds=centers[:-1] + delta / 2, levels=centers)
        assert midtread_variance(sigma, delta) == pytest.approx(
            quantized_variance(sigma, spec), abs=1e-12
        )


class TestQuantizedVariance:
    def test_binary_unit_variance(self):
        for sigma in (0.3, 1.0, 3.7):
            assert quantized_variance(sigma, BIN) == pytest.approx(1.0, abs=1e-15)

    def test_single_level_is_constant(self):
        const = FiniteQuantizer(thresholds=np.empty(0), levels=[4.0])
        assert quantized_variance(2.0, const) == 0.0
        assert quantized_mean(2.0, const) == 4.0

    def test_against_monte_carlo(self, twobit_specs):
        _, qz = twobit_specs
        rng = np.random.default_rng(99)
        n = 4_000_000
        zq = quantize_series(rng.standard_normal(n), qz)
        se = np.std((zq - zq.mean()) ** 2) / np.sqrt(n)
        assert abs(quantized_variance(1.0, qz) - zq.var()) < 3 * se


class TestMidtread:
    def test_cross_cov_against_monte_carlo(self):
        rng = np.random.default_rng(5)
        n = 4_000_000
        rho, s1, s2, d1, d2 = 0.4, 1.0, 1.6, 0.8, 1.1
        w = gaussian_pair_samples(rng, rho, s1, s2, n)
        q1 = quantize_series(w[:, 0], UniformQuantizer(d1))
        q2 = quantize_series(w[:, 1], UniformQuantizer(d2))
        mc = np.mean(q1 * q2) - q1.mean() * q2.mean()
        se = np.std(q1 * q2) / np.sqrt(n)
        assert abs(midtread_cross_cov(rho, s1, s2, d1, d2) - mc) < 3 * se

    def test_variance_against_monte_carlo(self):
        rng = np.random.default_rng(6)
        n = 4_000_000
        q = quantize_series(1.6 * rng.standard_normal(n), UniformQuantizer(1.1))
        se = np.std((q - q.mean()) ** 2) / np.sqrt(n)
        assert abs(midtread_variance(1.6, 1.1) - q.var()) < 3 * se

    def test_fine_step_variance_is_additive(self):
        # for fine steps the series corrections vanish and Var(Q) = var + step^2/12
        got = midtread_variance(2.0, 0.05)
        assert got == pytest.approx(4.0 + 0.05**2 / 12.0, rel=1e-12)

    def test_fine_step_cross_cov_matches_covariance(self):
        got = midtread_cross_cov(0.5, 1.0, 2.0, 0.05, 0.05)
        assert got == pytest.approx(1.0, rel=1e-10)


class TestTrueMomentBridges:
    def test_binary_true_moments_lags(self, causal_tm):
        mom = binary_true_moments(causal_tm, 2)
        assert set(mom.gamma_xz) == {-1, 0, 1, 2}
        assert set(mom.gamma_zz) == {0, 1, 2}
        assert mom.gamma_zz[0] == 1.0
        assert mom.gamma_xz[1] == pytest.approx(
            vanvleck_forward(causal_tm.rho_xz(1)), abs=1e-15
        )

    def test_quantized_true_moments_match_sampling(self, causal_model, causal_tm, twobit_specs):
        from qgranger.moments import estimate_moments
        from qgranger.signals import simulate_var

        qx, qz = twobit_specs
        mom = quantized_true_moments(causal_tm, qx, qz, 2, 4)
        pair = simulate_var(causal_model, 400_000, seed=31)
        xq = quantize_series(pair.x, qx)
        zq = quantize_series(pair.z, qz)
        est = estimate_moments(xq, zq, 2, 4, zero_mean=False)
        for k in mom.gamma_zz:
            prod = zq[: zq.size - k] * zq[k:]
            blocks = np.array_split(prod, 100)
            se = np.std([b.mean() for b in blocks]) / np.sqrt(100)
            assert abs(est.gamma_zz[k] - mom.gamma_zz[k]) < 4 * se

    def test_midtread_true_moments_lag_coverage(self, causal_tm):
        mom = midtread_true_moments(causal_tm, 0.5, 0.5, 2, 6)
        assert set(mom.gamma_xz) == {-1, 0, 1, 2}
        assert set(mom.gamma_zz) == set(range(7))

    def test_depth_validation(self, causal_tm, twobit_specs):
        qx, qz = twobit_specs
        with pytest.raises(ValueError, match="q >= m >= 1"):
            quantized_true_moments(causal_tm, qx, qz, 2, 1)
