"""Tests for random Gaussian matrix probing."""

import numpy as np
import pytest
from scipy import stats

from irs_skg import linalg
from irs_skg.channel import cascaded_channel
from irs_skg.errors import DimensionError
from irs_skg.sampling import PhaseAlphabet, RngStream, VarianceProfile, sample_irs_phase
from irs_skg.schemes import (
    ProbeMatrix,
    RgmParams,
    RgmScheme,
    SingularObservation,
    key_disagreement_rate,
    reconcile,
    rgm_round,
    run_protocol,
    svd_multiplications,
)


@pytest.fixture
def params():
    return RgmParams.uniform(4, 4, probe_length=50)


def mean_xi_sq(channels, draws=50):
    gen = np.random.default_rng(0)
    values = []
    for _ in range(draws):
        irs = sample_irs_phase(channels.n_r, PhaseAlphabet.continuous(), gen)
        values.append(linalg.largest_singular(cascaded_channel(channels.with_irs(irs))[0]) ** 2)
    return float(np.mean(values))


class TestRgmRound:
    def test_identical_scaled_probes_give_equal_values(self, desk_channels, params):
        """sigma(H_AB X) = sigma(H_BA X) when X is a scaled identity."""
        x = 2.0 * np.eye(4, dtype=complex)
        obs = rgm_round(desk_channels, params.profile_a, params.profile_b, 0.0, RngStream(0), known_probes=(x, x))
        assert obs.sigma_a == pytest.approx(obs.sigma_b, rel=1e-12)
        h_ab, _ = cascaded_channel(desk_channels)
        assert obs.sigma_b == pytest.approx(2.0 * linalg.largest_singular(h_ab), rel=1e-12)

    def test_top_k_features(self, desk_channels, params):
        obs = rgm_round(desk_channels, params.profile_a, params.profile_b, 0.1, RngStream(1), top_k=3)
        assert obs.features_a.shape == (3,)
        assert np.all(np.diff(obs.features_b) <= 0)
        assert obs.sigma_a == obs.features_a[0]

    def test_eve_block(self, desk_channels, params):
        channels = desk_channels.with_eves(3)
        obs = rgm_round(channels, params.profile_a, params.profile_b, 0.1, RngStream(1), observe_eves=True)
        assert obs.eve_block.shape == (12, 50)
        assert rgm_round(channels, params.profile_a, params.profile_b, 0.1, RngStream(1)).eve_block is None

    def test_dimension_mismatch(self, desk_channels):
        wrong = VarianceProfile.uniform(3, 50)
        ok = VarianceProfile.uniform(4, 50)
        with pytest.raises(DimensionError):
            rgm_round(desk_channels, wrong, ok, 0.0, RngStream(0))

    def test_reproducible(self, desk_channels, params):
        a = rgm_round(desk_channels, params.profile_a, params.profile_b, 0.1, RngStream(5))
        b = rgm_round(desk_channels, params.profile_a, params.profile_b, 0.1, RngStream(5))
        assert (a.sigma_a, a.sigma_b) == (b.sigma_a, b.sigma_b)
        assert a.lineage == RngStream(5).lineage

    def test_probe_draw_shape(self, params):
        probe = ProbeMatrix.draw(params.profile_a, np.random.default_rng(0))
        assert probe.matrix.shape == (4, 50)

    def test_observation_rejects_negative(self, desk_channels):
        with pytest.raises(ValueError):
            SingularObservation(sigma_a=-1.0, sigma_b=1.0, round_index=0, irs=desk_channels.irs)


class TestRunProtocol:
    def test_thread_count_does_not_change_results(self, desk_channels, params):
        serial = run_protocol(desk_channels, 30, params, RngStream(9), threads=1)
        threaded = run_protocol(desk_channels, 30, params, RngStream(9), threads=4)
        assert [o.sigma_a for o in serial] == [o.sigma_a for o in threaded]
        assert [o.round_index for o in threaded] == list(range(30))

    def test_fresh_phase_each_round(self, desk_channels, params):
        observations = run_protocol(desk_channels, 5, params, RngStream(9))
        phases = {tuple(o.irs.phases) for o in observations}
        assert len(phases) == 5

    def test_scheme_matches_protocol(self, desk_channels, params):
        scheme = RgmScheme.from_params(params)
        rounds = scheme.batch_features(desk_channels, 0.0, 10, params.alphabet, RngStream(4))
        observations = run_protocol(desk_channels, 10, params, RngStream(4))
        assert [f.alice[0] for f in rounds] == [o.sigma_a for o in observations]
        assert [f.bob[0] for f in rounds] == [o.sigma_b for o in observations]

    def test_rejects_zero_rounds(self, desk_channels, params):
        with pytest.raises(ValueError):
            run_protocol(desk_channels, 0, params, RngStream(0))

    @pytest.mark.slow
    def test_key_agreement_at_20db(self, desk_channels):
        noise_var = 1.0 * mean_xi_sq(desk_channels) * 10 ** (-20 / 10) / 2
        params = RgmParams.uniform(4, 4, probe_length=100, noise_var=noise_var)
        observations = run_protocol(desk_channels, 500, params, RngStream(42), threads=2)
        sigma_a = np.array([o.sigma_a for o in observations])
        sigma_b = np.array([o.sigma_b for o in observations])
        # measured: pearson 0.876, KDR 0.159, 377 of 500 rounds kept
        assert stats.pearsonr(sigma_a, sigma_b)[0] > 0.85
        key_a, key_b = reconcile(sigma_a, sigma_b, 2, 0.1)
        assert len(key_a.kept_rounds) >= 350
        assert key_disagreement_rate(key_a, key_b) < 0.2

    @pytest.mark.slow
    def test_agreement_improves_with_snr(self, desk_channels):
        pearson = []
        for snr in (20, 40):
            noise_var = 1.0 * mean_xi_sq(desk_channels) * 10 ** (-snr / 10) / 2
            params = RgmParams.uniform(4, 4, probe_length=100, noise_var=noise_var)
            observations = run_protocol(desk_channels, 500, params, RngStream(42), threads=2)
            sigma_a = np.array([o.sigma_a for o in observations])
            sigma_b = np.array([o.sigma_b for o in observations])
            pearson.append(stats.pearsonr(sigma_a, sigma_b)[0])
        assert pearson[1] > pearson[0]


class TestComplexity:
    def test_multiplications(self):
        assert svd_multiplications(4, 50) == 800
        assert svd_multiplications(4, 100) == 2 * svd_multiplications(4, 50)
