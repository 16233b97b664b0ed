"""Tests for the public-pilot baseline."""

import numpy as np
import pytest

from irs_skg.attack import ColludedEveAttack
from irs_skg.channel import cascaded_channel
from irs_skg.errors import DimensionError, RankDeficientError
from irs_skg.sampling import PhaseAlphabet, RngStream
from irs_skg.schemes import (
    FeatureMode,
    PilotMatrix,
    PilotScheme,
    ls_estimate,
    pilot_feature,
    received_pilot_signal,
)
from irs_skg.schemes.pilot import LS_ROUTE_TOL
from tests.helpers import random_complex


class TestPilotMatrix:
    def test_identity_row_energy(self):
        p = PilotMatrix.identity(4, row_power=1.5)
        np.testing.assert_allclose(np.sum(np.abs(p.matrix) ** 2, axis=1), 3.0)
        assert (p.n_antennas, p.length) == (4, 4)

    def test_random_unitary_rows_orthogonal(self):
        p = PilotMatrix.random_unitary(3, 6, RngStream(2))
        np.testing.assert_allclose(p.matrix @ p.matrix.conj().T, 2 * np.eye(3), atol=1e-12)

    def test_too_short(self):
        with pytest.raises(RankDeficientError):
            PilotMatrix(np.ones((3, 2)))

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            PilotMatrix(np.ones((2, 4)))


class TestLeastSquares:
    def test_noiseless_recovers_channel(self, gen):
        h = random_complex(gen, 3, 4)
        pilot = PilotMatrix(random_complex(gen, 4, 6))
        y = received_pilot_signal(h, pilot, 0.0, gen)
        np.testing.assert_allclose(ls_estimate(y, pilot), h, atol=1e-10)

    def test_routes_agree(self, gen):
        pilot = PilotMatrix(random_complex(gen, 3, 5))
        y = random_complex(gen, 2, 5)
        via_kron = ls_estimate(y, pilot, verify=True)
        direct = ls_estimate(y, pilot, verify=False)
        assert np.linalg.norm(via_kron - direct) / np.linalg.norm(direct) < LS_ROUTE_TOL

    def test_noisy_estimate_is_close(self, gen):
        h = random_complex(gen, 4, 4)
        pilot = PilotMatrix.identity(4, row_power=50.0)
        y = received_pilot_signal(h, pilot, 1e-4, gen)
        assert np.linalg.norm(ls_estimate(y, pilot) - h) / np.linalg.norm(h) < 1e-2

    def test_dimension_checks(self, gen):
        pilot = PilotMatrix.identity(3)
        with pytest.raises(DimensionError):
            received_pilot_signal(random_complex(gen, 2, 4), pilot, 0.0, gen)
        with pytest.raises(DimensionError):
            ls_estimate(random_complex(gen, 2, 4), pilot)


class TestFeatures:
    def test_rss(self):
        assert pilot_feature(np.array([[3.0, 4.0]])) == pytest.approx(25.0)

    def test_max_singular(self):
        assert pilot_feature(np.diag([2.0, 5.0]), FeatureMode.MAX_SINGULAR) == pytest.approx(5.0)


class TestPilotScheme:
    def test_noiseless_features_match(self, desk_channels):
        scheme = PilotScheme(PilotMatrix.identity(4), PilotMatrix.identity(4))
        features = scheme.features(desk_channels, 0.0, RngStream(0))
        h_ab, _ = cascaded_channel(desk_channels)
        assert features.alice[0] == pytest.approx(features.bob[0], rel=1e-10)
        assert features.bob[0] == pytest.approx(np.linalg.norm(h_ab) ** 2, rel=1e-10)
        assert features.eve is None

    def test_batch_is_reproducible_and_thread_independent(self, desk_channels):
        scheme = PilotScheme(PilotMatrix.identity(4), PilotMatrix.identity(4))
        args = (desk_channels, 0.01, 20, PhaseAlphabet.continuous(), RngStream(3))
        serial = scheme.batch_features(*args, threads=1)
        threaded = scheme.batch_features(*args, threads=4)
        assert [f.alice[0] for f in serial] == [f.alice[0] for f in threaded]
        assert [f.round_index for f in serial] == list(range(20))

    def test_phase_changes_every_round(self, desk_channels):
        scheme = PilotScheme(PilotMatrix.identity(4), PilotMatrix.identity(4))
        rounds = scheme.batch_features(desk_channels, 0.0, 5, PhaseAlphabet.continuous(), RngStream(3))
        assert len({f.bob[0] for f in rounds}) == 5

    def test_attack_reports_eve_feature(self, desk_channels):
        pilot = PilotMatrix.identity(4)
        scheme = PilotScheme(pilot, pilot, attack=ColludedEveAttack(pilot))
        features = scheme.features(desk_channels, 0.0, RngStream(0))
        assert features.eve is not None
        assert features.eve[0] == pytest.approx(features.bob[0], rel=1e-6)
        assert features.metadata["nrmse"] < 1e-6

    def test_rounds_must_be_positive(self, desk_channels):
        scheme = PilotScheme(PilotMatrix.identity(4), PilotMatrix.identity(4))
        with pytest.raises(ValueError):
            scheme.batch_features(desk_channels, 0.0, 0, PhaseAlphabet.continuous(), RngStream(3))
