"""Tests for the Gaussian approximations of the largest singular value."""

import numpy as np
import pytest
from scipy import stats

from irs_skg import linalg
from irs_skg.errors import DimensionError, NumericalError
from irs_skg.sampling import VarianceProfile, complex_normal
from irs_skg.theory import (
    GaussianApprox,
    channel_moments,
    moment_bounds,
    noiseless_moments,
    noisy_moments,
    solve_moments,
)
from tests.helpers import haar_unitary, random_complex


def unit_vector(gen, n):
    v = random_complex(gen, n)
    return v / np.linalg.norm(v)


def dominant_channel(gen, n=4):
    """Random 4x4 channel whose leading singular value stands well clear of the rest."""
    xi = np.array([3.0, 0.5, 0.3, 0.1])[:n]
    return haar_unitary(gen, n) @ np.diag(xi) @ haar_unitary(gen, n).conj().T


def sigma_max_draws(gen, h, profile, noise_var=0.0, draws=10_000, chunk=2_000):
    out = []
    for _ in range(draws // chunk):
        x = complex_normal((chunk, *profile.deltas.shape), profile.deltas, gen)
        y = h @ x
        if noise_var > 0:
            y = y + complex_normal(y.shape, noise_var, gen)
        out.append(np.linalg.svd(y, compute_uv=False)[:, 0])
    return np.concatenate(out)


class TestSolveMoments:
    def test_round_trip(self):
        approx = GaussianApprox(mean=2.0, variance=0.3)
        s1 = approx.second_moment
        s2 = 2 * approx.variance**2 + 4 * approx.mean**2 * approx.variance
        solved = solve_moments(s1, s2)
        assert solved.mean == pytest.approx(2.0, rel=1e-12)
        assert solved.variance == pytest.approx(0.3, rel=1e-10)

    def test_negative_radicand(self):
        with pytest.raises(NumericalError):
            solve_moments(1.0, 3.0)

    def test_std(self):
        assert GaussianApprox(1.0, 4.0).std == 2.0


class TestNoiselessMoments:
    def test_second_moment_identity(self, gen):
        for _ in range(1000):
            rows, cols = gen.integers(1, 6), gen.integers(1, 40)
            c = gen.uniform(0.1, 5.0)
            xi1 = gen.uniform(0.1, 10.0)
            profile = VarianceProfile.random(rows, cols, gen, row_sum=c)
            approx = noiseless_moments(xi1, unit_vector(gen, rows), profile)
            assert approx.second_moment == pytest.approx(2 * c * xi1**2, rel=1e-10)
            assert approx.variance >= 0

    def test_uniform_profile(self):
        xi1, c, d = 1.7, 2.0, 100
        profile = VarianceProfile.uniform(4, d, row_sum=c)
        v = np.full(4, 0.5, dtype=complex)
        approx = noiseless_moments(xi1, v, profile)
        assert approx.mean == pytest.approx(xi1 * np.sqrt(c) * (4 - 2 / d) ** 0.25, rel=1e-12)
        assert approx.variance == pytest.approx(xi1**2 * c * (2 - np.sqrt(4 - 2 / d)), rel=1e-9)

    def test_long_probe_limit(self):
        approx = noiseless_moments(2.0, np.ones(1), VarianceProfile.uniform(1, 10**6))
        assert approx.mean == pytest.approx(2.0 * np.sqrt(2.0), rel=1e-4)
        assert approx.variance < 1e-4 * 4.0

    def test_vector_checks(self):
        profile = VarianceProfile.uniform(3, 10)
        with pytest.raises(DimensionError):
            noiseless_moments(1.0, np.ones(4) / 2, profile)
        with pytest.raises(ValueError):
            noiseless_moments(1.0, np.ones(3), profile)

    @pytest.mark.slow
    def test_matches_monte_carlo(self, gen):
        h = dominant_channel(gen)
        profile = VarianceProfile.uniform(4, 100)
        svd = linalg.compact_svd(h)
        approx = noiseless_moments(svd.xi1, svd.right[:, 0], profile)
        sigma = sigma_max_draws(gen, h, profile)
        stderr = sigma.std(ddof=1) / np.sqrt(sigma.size)
        assert abs(sigma.mean() - approx.mean) < 3 * stderr
        assert sigma.var(ddof=1) == pytest.approx(approx.variance, rel=0.15)
        assert abs(stats.skew(sigma)) < 0.15
        assert abs(stats.kurtosis(sigma)) < 0.3


class TestMomentBounds:
    def test_uniform_profile_collapses(self):
        profile = VarianceProfile.uniform(4, 50)
        bounds = moment_bounds(1.3, profile)
        approx = noiseless_moments(1.3, np.full(4, 0.5), profile)
        assert bounds.eta_min == pytest.approx(bounds.eta_max, rel=1e-12)
        assert bounds.eta_min == pytest.approx(approx.mean, rel=1e-12)

    def test_brackets_random_profiles(self, gen):
        for _ in range(100):
            profile = VarianceProfile.random(4, 30, gen, row_sum=1.5)
            bounds = moment_bounds(2.0, profile)
            assert bounds.eta_min <= bounds.eta_max
            assert bounds.iota_sq_min <= bounds.iota_sq_max
            assert bounds.contains(noiseless_moments(2.0, unit_vector(gen, 4), profile))

    def test_both_directions_bracketed(self, gen):
        h = random_complex(gen, 4, 4)
        profile = VarianceProfile.random(4, 60, gen)
        alice, bob = channel_moments(h, profile, profile)
        bounds = moment_bounds(linalg.largest_singular(h), profile)
        assert bounds.contains(alice)
        assert bounds.contains(bob)


class TestNoisyMoments:
    def test_reduces_to_noiseless(self, gen):
        profile = VarianceProfile.random(3, 20, gen)
        v = unit_vector(gen, 3)
        noisy = noisy_moments(1.4, v, profile, 0.0)
        clean = noiseless_moments(1.4, v, profile)
        assert noisy.mean == pytest.approx(clean.mean, rel=1e-14)
        assert noisy.variance == pytest.approx(clean.variance, rel=1e-12)

    def test_second_moment_identity(self, gen):
        for _ in range(200):
            profile = VarianceProfile.random(4, 50, gen, row_sum=2.0)
            xi1, eps2 = gen.uniform(0.5, 5.0), gen.uniform(0.0, 0.5)
            approx = noisy_moments(xi1, unit_vector(gen, 4), profile, eps2)
            assert approx.second_moment == pytest.approx(2 * 2.0 * xi1**2 + 2 * 50 * eps2, rel=1e-10)

    def test_negative_noise(self):
        with pytest.raises(ValueError):
            noisy_moments(1.0, np.ones(1), VarianceProfile.uniform(1, 4), -0.1)

    def test_channel_moments_zero_channel(self):
        profile = VarianceProfile.uniform(2, 10)
        with pytest.raises(NumericalError):
            channel_moments(np.zeros((2, 2)), profile, profile)

    @pytest.mark.slow
    def test_matches_monte_carlo(self, gen):
        h = dominant_channel(gen)
        profile = VarianceProfile.uniform(4, 100)
        svd = linalg.compact_svd(h)
        # 2 D eps^2 = 0.01 * 2 C xi^2
        noise_var = 0.01 * profile.row_sum * svd.xi1**2 / profile.cols
        _, bob = channel_moments(h, profile, profile, noise_var)
        sigma = sigma_max_draws(gen, h, profile, noise_var)
        stderr = sigma.std(ddof=1) / np.sqrt(sigma.size)
        assert abs(sigma.mean() - bob.mean) < 3 * stderr
        assert sigma.var(ddof=1) == pytest.approx(bob.variance, rel=0.15)

    @pytest.mark.slow
    def test_noise_on_weaker_modes_biases_mean_up(self, gen):
        h = dominant_channel(gen)
        profile = VarianceProfile.uniform(4, 100)
        svd = linalg.compact_svd(h)
        # 2 D eps^2 = 2 C xi^2: the other three rows add their own noise energy
        noise_var = profile.row_sum * svd.xi1**2 / profile.cols
        _, bob = channel_moments(h, profile, profile, noise_var)
        sigma = sigma_max_draws(gen, h, profile, noise_var)
        stderr = sigma.std(ddof=1) / np.sqrt(sigma.size)
        assert sigma.mean() > bob.mean + 3 * stderr


class TestApproximationRegime:
    @pytest.mark.slow
    def test_tied_top_modes_exceed_prediction(self, gen):
        xi = np.array([2.0, 2.0, 0.3, 0.1])
        h = haar_unitary(gen, 4) @ np.diag(xi) @ haar_unitary(gen, 4).conj().T
        profile = VarianceProfile.uniform(4, 100)
        svd = linalg.compact_svd(h)
        approx = noiseless_moments(svd.xi1, svd.right[:, 0], profile)
        sigma = sigma_max_draws(gen, h, profile)
        stderr = sigma.std(ddof=1) / np.sqrt(sigma.size)
        assert sigma.mean() > approx.mean + 10 * stderr
