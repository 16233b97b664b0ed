"""Shared fixtures: a desk-scale deployment and seeded generators."""

import numpy as np
import pytest

from irs_skg.channel import ArrayGeometry, PathStats, Topology, build_channel_set
from irs_skg.sampling import PhaseAlphabet, RngStream


@pytest.fixture
def gen():
    return np.random.default_rng(20240601)


@pytest.fixture
def desk_topology():
    """4-antenna terminals, 2x4 IRS, up to 16 Eves."""
    return Topology(
        alice=ArrayGeometry.ula(4),
        bob=ArrayGeometry.ula(4),
        eve=ArrayGeometry.ula(4),
        irs=ArrayGeometry.upa(2, 4),
        n_eves=16,
    )


@pytest.fixture
def desk_channels(desk_topology):
    return build_channel_set(desk_topology, PathStats(), PhaseAlphabet.continuous(), RngStream(7))
