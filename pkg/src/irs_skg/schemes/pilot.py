"""Globally-known pilot baseline.

Alice and Bob send public full-row-rank pilots, estimate the reciprocal
channel by least squares and extract one real feature per round (received
signal strength by default).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from irs_skg import linalg
from irs_skg.channel import ChannelSet, cascaded_channel
from irs_skg.errors import DimensionError, NumericalError, RankDeficientError
from irs_skg.sampling import RngLike, Role, as_generator, child, noise_matrix
from irs_skg.schemes.base import KeyScheme, RoundFeatures

if TYPE_CHECKING:
    from irs_skg.attack.colluded import ColludedEveAttack

logger = logging.getLogger(__name__)

LS_ROUTE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PilotMatrix:
    """Pilot ``P`` of shape ``N x L`` with ``L >= N`` and full row rank."""

    matrix: np.ndarray

    def __post_init__(self):
        p = linalg.as_matrix(self.matrix, "pilot")
        n, length = p.shape
        if length < n:
            raise RankDeficientError(f"pilot needs at least as many columns as rows, got {n}x{length}")
        r = linalg.rank(p)
        if r != n:
            raise RankDeficientError(f"pilot must have full row rank {n}, got rank {r}")
        object.__setattr__(self, "matrix", p)

    @classmethod
    def identity(cls, n: int, row_power: float = 1.0) -> "PilotMatrix":
        """``sqrt(2C) I``: each row carries the expected energy ``2C`` of a probe row."""
        return cls(np.sqrt(2 * row_power) * np.eye(n, dtype=np.complex128))

    @classmethod
    def random_unitary(cls, n: int, length: int, rng: RngLike, row_power: float = 1.0) -> "PilotMatrix":
        """Orthonormal rows drawn from the Haar measure, scaled like :meth:`identity`."""
        gen = as_generator(rng)
        g = gen.standard_normal((length, n)) + 1j * gen.standard_normal((length, n))
        q, r = np.linalg.qr(g)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        return cls(np.sqrt(2 * row_power) * q.T)

    @property
    def n_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def length(self) -> int:
        return self.matrix.shape[1]


def received_pilot_signal(h: np.ndarray, pilot: PilotMatrix, noise_var: float, rng: RngLike) -> np.ndarray:
    """``Y = H P + N``."""
    h = linalg.as_matrix(h, "channel")
    if h.shape[1] != pilot.n_antennas:
        raise DimensionError(f"channel has {h.shape[1]} transmit antennas but pilot has {pilot.n_antennas} rows")
    y = h @ pilot.matrix
    if noise_var > 0:
        y = y + noise_matrix(y.shape[0], y.shape[1], noise_var, rng)
    return y


def ls_estimate(y: np.ndarray, pilot: PilotMatrix, verify: bool = True) -> np.ndarray:
    """Least-squares channel estimate from ``Y = H P + N``.

    Solves ``vec(Y) = (P^T kron I) vec(H)`` with a pseudoinverse and, when
    ``verify`` is set, checks it against ``Y P^+``.
    """
    y = linalg.as_matrix(y, "received signal")
    p = pilot.matrix
    if y.shape[1] != pilot.length:
        raise DimensionError(f"received block has {y.shape[1]} columns but pilot length is {pilot.length}")

    direct = y @ linalg.pinv(p)
    if not verify:
        return direct

    n_rx = y.shape[0]
    system = linalg.kron(p.T, np.eye(n_rx))
    h_vec = linalg.pinv(system) @ linalg.vec(y)
    via_kron = linalg.unvec(h_vec, n_rx, pilot.n_antennas)

    scale = max(np.linalg.norm(direct), 1.0)
    gap = np.linalg.norm(via_kron - direct) / scale
    if gap > LS_ROUTE_TOL:
        raise NumericalError(f"LS estimate routes disagree by {gap:.3e} (relative)")
    return via_kron


class FeatureMode(str, Enum):
    RSS = "rss"
    MAX_SINGULAR = "max_singular"


def pilot_feature(h_hat: np.ndarray, mode: FeatureMode = FeatureMode.RSS) -> float:
    mode = FeatureMode(mode)
    if mode is FeatureMode.RSS:
        return float(np.linalg.norm(h_hat) ** 2)
    return linalg.largest_singular(h_hat)


class PilotScheme(KeyScheme):
    """Pilot exchange per round; optionally scores colluding Eves on Alice's pilot."""

    name = "pilot"

    def __init__(
        self,
        pilot_a: PilotMatrix,
        pilot_b: PilotMatrix,
        mode: FeatureMode = FeatureMode.RSS,
        attack: "ColludedEveAttack | None" = None,
        verify_ls: bool = False,
    ):
        self.pilot_a = pilot_a
        self.pilot_b = pilot_b
        self.mode = FeatureMode(mode)
        self.attack = attack
        self.verify_ls = verify_ls

    def features(
        self, channels: ChannelSet, noise_var: float, rng: RngLike, round_index: int = 0
    ) -> RoundFeatures:
        h_ab, h_ba = cascaded_channel(channels)
        y_b = received_pilot_signal(h_ab, self.pilot_a, noise_var, child(rng, Role.NOISE_B))
        y_a = received_pilot_signal(h_ba, self.pilot_b, noise_var, child(rng, Role.NOISE_A))
        h_ab_hat = ls_estimate(y_b, self.pilot_a, verify=self.verify_ls)
        h_ba_hat = ls_estimate(y_a, self.pilot_b, verify=self.verify_ls)

        eve = None
        metadata = {}
        if self.attack is not None and channels.n_eves > 0:
            result = self.attack.run(channels, noise_var, child(rng, Role.NOISE_E))
            eve = np.array([pilot_feature(result.h_hat, self.mode)])
            metadata["nrmse"] = result.nrmse

        return RoundFeatures(
            round_index=round_index,
            alice=np.array([pilot_feature(h_ba_hat, self.mode)]),
            bob=np.array([pilot_feature(h_ab_hat, self.mode)]),
            irs=channels.irs,
            eve=eve,
            metadata=metadata,
        )
