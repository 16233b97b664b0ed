"""Tests for random streams, variance profiles and IRS phases."""

import numpy as np
import pytest

from irs_skg.errors import ConfigError, DimensionError
from irs_skg.sampling import (
    IrsPhaseVector,
    PhaseAlphabet,
    RngStream,
    Role,
    VarianceProfile,
    as_generator,
    child,
    complex_gaussian_matrix,
    complex_normal,
    noise_matrix,
    sample_irs_phase,
)


class TestRngStream:
    def test_same_stream_same_draws(self):
        a = RngStream(42).derive(Role.TRIAL, 3).generator().standard_normal(5)
        b = RngStream(42).derive(Role.TRIAL, 3).generator().standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_different_keys_differ(self):
        root = RngStream(42)
        a = root.derive(Role.TRIAL, 3).generator().standard_normal(5)
        b = root.derive(Role.TRIAL, 4).generator().standard_normal(5)
        assert not np.allclose(a, b)

    def test_different_seeds_differ(self):
        a = RngStream(1).generator().standard_normal(3)
        b = RngStream(2).generator().standard_normal(3)
        assert not np.allclose(a, b)

    def test_lineage(self):
        stream = RngStream(42).derive(1)
        assert stream.lineage.startswith("42:")
        assert len(stream.lineage.split(":")[1]) == 16

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            RngStream(-1)

    def test_child_passes_generator_through(self):
        gen = np.random.default_rng(0)
        assert child(gen, 1, 2) is gen
        assert isinstance(child(RngStream(0), 1), RngStream)

    def test_as_generator_type_check(self):
        with pytest.raises(TypeError):
            as_generator(42)


class TestVarianceProfile:
    def test_uniform(self):
        p = VarianceProfile.uniform(4, 50, row_sum=2.0)
        assert p.rows == 4
        assert p.cols == 50
        assert p.is_uniform
        np.testing.assert_allclose(p.deltas.sum(axis=1), 2.0)

    def test_random_rows_sum_exactly(self):
        p = VarianceProfile.random(4, 30, RngStream(3), row_sum=1.5)
        assert not p.is_uniform
        np.testing.assert_allclose(p.deltas.sum(axis=1), 1.5, rtol=0, atol=1e-12)

    def test_rejects_bad_row_sum(self):
        with pytest.raises(ConfigError):
            VarianceProfile(np.array([[0.5, 0.4]]), 1.0)

    def test_rejects_negative(self):
        with pytest.raises(ConfigError):
            VarianceProfile(np.array([[1.5, -0.5]]), 1.0)

    def test_rejects_1d(self):
        with pytest.raises(DimensionError):
            VarianceProfile(np.array([0.5, 0.5]), 1.0)

    def test_read_only(self):
        p = VarianceProfile.uniform(2, 2)
        with pytest.raises(ValueError):
            p.deltas[0, 0] = 1.0


class TestComplexGaussian:
    def test_per_part_variance(self):
        x = complex_normal((200_000,), 0.25, np.random.default_rng(1))
        assert np.var(x.real) == pytest.approx(0.25, rel=0.02)
        assert np.var(x.imag) == pytest.approx(0.25, rel=0.02)
        assert np.mean(np.abs(x) ** 2) == pytest.approx(0.5, rel=0.02)

    def test_profile_row_energy(self):
        """Expected row energy of a probe is 2C."""
        profile = VarianceProfile.uniform(3, 100, row_sum=1.0)
        gen = np.random.default_rng(2)
        energies = [np.sum(np.abs(complex_gaussian_matrix(profile, gen)) ** 2, axis=1) for _ in range(500)]
        np.testing.assert_allclose(np.mean(energies, axis=0), 2.0, rtol=0.03)

    def test_zero_variance_columns(self):
        deltas = np.array([[1.0, 0.0]])
        x = complex_gaussian_matrix(VarianceProfile(deltas, 1.0), np.random.default_rng(0))
        assert x[0, 1] == 0

    def test_noise_rejects_negative_variance(self):
        with pytest.raises(ConfigError):
            noise_matrix(2, 2, -1.0, np.random.default_rng(0))


class TestIrsPhase:
    def test_unit_modulus(self):
        irs = sample_irs_phase(16, PhaseAlphabet.continuous(), RngStream(0))
        np.testing.assert_allclose(np.abs(irs.w), 1.0)
        assert irs.n_elements == 16

    def test_discrete_alphabet(self):
        irs = sample_irs_phase(500, PhaseAlphabet.discrete(4), np.random.default_rng(0))
        assert set(irs.indices.tolist()) == {0, 1, 2, 3}
        np.testing.assert_allclose(irs.w**4, 1.0, atol=1e-12)

    @pytest.mark.parametrize("levels", [0, 1])
    def test_discrete_alphabet_needs_two_levels(self, levels):
        with pytest.raises(ConfigError):
            PhaseAlphabet.discrete(levels)

    def test_from_indices(self):
        irs = IrsPhaseVector.from_indices([0, 1, 2, 3], 4)
        np.testing.assert_allclose(irs.w, [1, 1j, -1, -1j], atol=1e-15)
        assert irs.indices.tolist() == [0, 1, 2, 3]

    def test_phases_wrap(self):
        irs = IrsPhaseVector(np.array([2 * np.pi + 0.5, -0.5]))
        assert np.all((irs.phases >= 0) & (irs.phases < 2 * np.pi))

    def test_continuous_has_no_indices(self):
        with pytest.raises(ValueError):
            IrsPhaseVector(np.zeros(3)).indices

    def test_rejects_empty(self):
        with pytest.raises(ConfigError):
            sample_irs_phase(0, PhaseAlphabet.continuous(), np.random.default_rng(0))
        with pytest.raises(DimensionError):
            IrsPhaseVector(np.zeros(0))
