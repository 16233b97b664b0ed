"""IRS-cascaded channels.

``ChannelSet`` bundles the direct links of one deployment with the IRS phase
vector of the current coherence round:

    H_AB   = G_RB diag(w) G_AR + G_AB      (Bob receives from Alice)
    H_BA   = H_AB^H
    H_AE_m = G_RE_m diag(w) G_AR + G_AE_m  (Eve m receives from Alice)
    H_BE_m = G_RE_m diag(w) G_RB^H + G_BE_m

Eves are indexed from 0.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from irs_skg.channel.geometry import ArrayGeometry, DirectChannel, PathStats, random_direct_channel
from irs_skg.errors import ConfigError, DimensionError
from irs_skg.sampling import IrsPhaseVector, PhaseAlphabet, RngLike, RngStream, Role, child, sample_irs_phase


class Party(str, Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class EveLink:
    g_re: DirectChannel  # IRS -> Eve, N_E x N_R
    g_ae: DirectChannel  # Alice -> Eve, N_E x N_A
    g_be: DirectChannel | None = None  # Bob -> Eve, N_E x N_B


@dataclass(frozen=True)
class Topology:
    """Array geometries of every node and the number of colluding Eves."""

    alice: ArrayGeometry
    bob: ArrayGeometry
    eve: ArrayGeometry
    irs: ArrayGeometry
    n_eves: int = 1

    def __post_init__(self):
        if self.n_eves < 0:
            raise ConfigError(f"number of Eves must be non-negative, got {self.n_eves}")


@dataclass(frozen=True)
class ChannelSet:
    g_ar: DirectChannel  # Alice -> IRS, N_R x N_A
    g_rb: DirectChannel  # IRS -> Bob, N_B x N_R
    g_ab: DirectChannel  # Alice -> Bob, N_B x N_A
    eves: tuple[EveLink, ...]
    irs: IrsPhaseVector

    def __post_init__(self):
        n_r, n_a = self.g_ar.matrix.shape
        n_b = self.g_ab.n_rx
        if self.g_rb.matrix.shape != (n_b, n_r):
            raise DimensionError(f"G_RB must be {n_b}x{n_r}, got {self.g_rb.matrix.shape}")
        if self.g_ab.matrix.shape != (n_b, n_a):
            raise DimensionError(f"G_AB must be {n_b}x{n_a}, got {self.g_ab.matrix.shape}")
        if self.irs.n_elements != n_r:
            raise DimensionError(f"IRS has {self.irs.n_elements} elements but channels expect {n_r}")
        for m, eve in enumerate(self.eves):
            n_e = eve.g_re.n_rx
            if eve.g_re.matrix.shape != (n_e, n_r) or eve.g_ae.matrix.shape != (n_e, n_a):
                raise DimensionError(f"Eve {m} links do not conform to N_R={n_r}, N_A={n_a}")
            if eve.g_be is not None and eve.g_be.matrix.shape != (n_e, n_b):
                raise DimensionError(f"Eve {m} link from Bob must be {n_e}x{n_b}")

    @property
    def n_a(self) -> int:
        return self.g_ar.n_tx

    @property
    def n_b(self) -> int:
        return self.g_ab.n_rx

    @property
    def n_r(self) -> int:
        return self.g_ar.n_rx

    @property
    def n_eves(self) -> int:
        return len(self.eves)

    def with_irs(self, irs: IrsPhaseVector) -> "ChannelSet":
        return replace(self, irs=irs)

    def with_eves(self, count: int) -> "ChannelSet":
        """The same deployment restricted to its first ``count`` Eves."""
        if not 0 <= count <= self.n_eves:
            raise ConfigError(f"cannot keep {count} of {self.n_eves} Eves")
        return replace(self, eves=self.eves[:count])


def _through_irs(g_out: np.ndarray, w: np.ndarray, g_in: np.ndarray) -> np.ndarray:
    return (g_out * w[None, :]) @ g_in


def cascaded_channel(channels: ChannelSet) -> tuple[np.ndarray, np.ndarray]:
    """Legitimate channel pair ``(H_AB, H_BA)``."""
    h_ab = _through_irs(channels.g_rb.matrix, channels.irs.w, channels.g_ar.matrix) + channels.g_ab.matrix
    return h_ab, h_ab.conj().T


def eve_channel(channels: ChannelSet, m: int, transmitter: Party = Party.ALICE) -> np.ndarray:
    """Channel from ``transmitter`` to Eve ``m`` (0-based), ``N_E x N_tx``."""
    if not 0 <= m < channels.n_eves:
        raise IndexError(f"Eve index {m} out of range for {channels.n_eves} Eves")
    eve = channels.eves[m]
    w = channels.irs.w
    if Party(transmitter) is Party.ALICE:
        return _through_irs(eve.g_re.matrix, w, channels.g_ar.matrix) + eve.g_ae.matrix
    if eve.g_be is None:
        raise ConfigError(f"Eve {m} has no direct link from Bob")
    return _through_irs(eve.g_re.matrix, w, channels.g_rb.matrix.conj().T) + eve.g_be.matrix


def stacked_eve_channel(channels: ChannelSet, transmitter: Party = Party.ALICE) -> np.ndarray:
    """Row-stacked channels of all colluding Eves, ``(M N_E) x N_tx``."""
    if channels.n_eves == 0:
        raise ConfigError("channel set has no Eves")
    return np.vstack([eve_channel(channels, m, transmitter) for m in range(channels.n_eves)])


def build_channel_set(
    topology: Topology,
    stats: PathStats,
    alphabet: PhaseAlphabet,
    rng: RngLike,
) -> ChannelSet:
    """Draw every direct link of a deployment plus an initial IRS phase.

    With an :class:`RngStream`, link ``k`` and Eve ``m`` use their own keyed
    streams, so a deployment with more Eves extends (never changes) one with
    fewer.
    """
    if isinstance(rng, RngStream):

        def link(*keys: int) -> RngLike:
            return rng.derive(Role.CHANNEL, *keys)

    else:

        def link(*keys: int) -> RngLike:
            return rng

    g_ar = random_direct_channel(topology.alice, topology.irs, stats, link(0))
    g_rb = random_direct_channel(topology.irs, topology.bob, stats, link(1))
    g_ab = random_direct_channel(topology.alice, topology.bob, stats, link(2))
    irs = sample_irs_phase(topology.irs.size, alphabet, child(rng, Role.IRS))
    eves = tuple(
        EveLink(
            g_re=random_direct_channel(topology.irs, topology.eve, stats, link(3, m, 0)),
            g_ae=random_direct_channel(topology.alice, topology.eve, stats, link(3, m, 1)),
            g_be=random_direct_channel(topology.bob, topology.eve, stats, link(3, m, 2)),
        )
        for m in range(topology.n_eves)
    )
    return ChannelSet(g_ar=g_ar, g_rb=g_rb, g_ab=g_ab, eves=eves, irs=irs)
