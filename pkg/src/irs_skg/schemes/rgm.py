"""Random Gaussian matrix (RGM) key generation.

Each coherence round the IRS takes a fresh phase vector, Alice and Bob each
transmit a secret Gaussian probe ``X`` (``N x D``, row power ``C``) and each
keeps the largest singular value of what it receives:

    sigma_B = sigma_max(H_AB X_A + N_B)
    sigma_A = sigma_max(H_BA X_B + N_A)

The two values are close because ``H_AB`` and ``H_BA`` share their singular
values. Probes never leave this module; Eves only ever see ``H_eve X_A + N_E``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from irs_skg import linalg
from irs_skg.channel import ChannelSet, cascaded_channel, stacked_eve_channel
from irs_skg.errors import DimensionError
from irs_skg.sampling import (
    IrsPhaseVector,
    PhaseAlphabet,
    RngLike,
    RngStream,
    Role,
    VarianceProfile,
    child,
    complex_gaussian_matrix,
    noise_matrix,
)
from irs_skg.schemes.base import KeyScheme, RoundFeatures, round_channels
from irs_skg.workers import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_PROBE_LENGTH = 100


@dataclass(frozen=True, eq=False)
class ProbeMatrix:
    matrix: np.ndarray  # N x D
    profile: VarianceProfile

    @classmethod
    def draw(cls, profile: VarianceProfile, rng: RngLike) -> "ProbeMatrix":
        return cls(complex_gaussian_matrix(profile, rng), profile)


@dataclass(frozen=True, eq=False)
class SingularObservation:
    """One round of the protocol as seen by the legitimate ends."""

    sigma_a: float
    sigma_b: float
    round_index: int
    irs: IrsPhaseVector
    features_a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    features_b: np.ndarray = field(default_factory=lambda: np.zeros(0))
    eve_block: np.ndarray | None = None  # Z_E = H_eve X_A + N_E
    lineage: str = ""

    def __post_init__(self):
        for name in ("sigma_a", "sigma_b"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value}")

    def to_features(self) -> RoundFeatures:
        return RoundFeatures(
            round_index=self.round_index,
            alice=self.features_a if self.features_a.size else np.array([self.sigma_a]),
            bob=self.features_b if self.features_b.size else np.array([self.sigma_b]),
            irs=self.irs,
            metadata={"lineage": self.lineage},
        )


def _top_singular(m: np.ndarray, k: int) -> np.ndarray:
    s = linalg.singular_values(m)
    out = np.zeros(k)
    out[: min(k, s.size)] = s[:k]
    return out


def rgm_round(
    channels: ChannelSet,
    profile_a: VarianceProfile,
    profile_b: VarianceProfile,
    noise_var: float,
    rng: RngLike,
    round_index: int = 0,
    top_k: int = 1,
    observe_eves: bool = False,
    known_probes: tuple[np.ndarray, np.ndarray] | None = None,
) -> SingularObservation:
    """One coherence round with the IRS phase already in ``channels``.

    ``known_probes`` replaces the random ``(X_A, X_B)`` pair and exists for
    tests.
    """
    if profile_a.rows != channels.n_a or profile_b.rows != channels.n_b:
        raise DimensionError(
            f"probe profiles have {profile_a.rows} and {profile_b.rows} rows; "
            f"Alice has {channels.n_a} antennas and Bob {channels.n_b}"
        )
    if top_k < 1:
        raise ValueError(f"top_k must be at least 1, got {top_k}")

    h_ab, h_ba = cascaded_channel(channels)
    if known_probes is None:
        x_a = ProbeMatrix.draw(profile_a, child(rng, Role.PROBE_A)).matrix
        x_b = ProbeMatrix.draw(profile_b, child(rng, Role.PROBE_B)).matrix
    else:
        x_a, x_b = (linalg.as_matrix(x) for x in known_probes)

    y_b = h_ab @ x_a
    y_a = h_ba @ x_b
    if noise_var > 0:
        y_b = y_b + noise_matrix(*y_b.shape, noise_var, child(rng, Role.NOISE_B))
        y_a = y_a + noise_matrix(*y_a.shape, noise_var, child(rng, Role.NOISE_A))

    eve_block = None
    if observe_eves and channels.n_eves:
        eve_block = stacked_eve_channel(channels) @ x_a
        if noise_var > 0:
            eve_block = eve_block + noise_matrix(*eve_block.shape, noise_var, child(rng, Role.NOISE_E))

    features_a = _top_singular(y_a, top_k)
    features_b = _top_singular(y_b, top_k)
    return SingularObservation(
        sigma_a=float(features_a[0]),
        sigma_b=float(features_b[0]),
        round_index=round_index,
        irs=channels.irs,
        features_a=features_a,
        features_b=features_b,
        eve_block=eve_block,
        lineage=rng.lineage if isinstance(rng, RngStream) else "",
    )


@dataclass(frozen=True)
class RgmParams:
    profile_a: VarianceProfile
    profile_b: VarianceProfile
    alphabet: PhaseAlphabet = field(default_factory=PhaseAlphabet.continuous)
    noise_var: float = 0.0
    top_k: int = 1

    @classmethod
    def uniform(
        cls,
        n_a: int,
        n_b: int,
        probe_length: int = DEFAULT_PROBE_LENGTH,
        row_power: float = 1.0,
        **kwargs,
    ) -> "RgmParams":
        return cls(
            VarianceProfile.uniform(n_a, probe_length, row_power),
            VarianceProfile.uniform(n_b, probe_length, row_power),
            **kwargs,
        )


def run_protocol(
    channels: ChannelSet,
    rounds: int,
    params: RgmParams,
    rng: RngLike,
    threads: int = 1,
    observe_eves: bool = False,
) -> list[SingularObservation]:
    """Repeat the protocol for ``rounds`` coherence rounds, fresh IRS phase and probes each round.

    The direct links in ``channels`` stay fixed across rounds.
    """
    if rounds < 1:
        raise ValueError(f"need at least one round, got {rounds}")

    def one(r: int) -> SingularObservation:
        round_set, stream = round_channels(channels, params.alphabet, rng, r)
        return rgm_round(
            round_set,
            params.profile_a,
            params.profile_b,
            params.noise_var,
            stream,
            round_index=r,
            top_k=params.top_k,
            observe_eves=observe_eves,
        )

    workers = threads if isinstance(rng, RngStream) else 1
    observations = parallel_map(one, range(rounds), workers)
    logger.debug("ran %d RGM rounds (D=%d)", rounds, params.profile_a.cols)
    return observations


def svd_multiplications(n: int, d: int) -> int:
    """Complex multiplications to form one ``N x D`` received block's Gram matrix: ``N^2 D``."""
    return n * n * d


class RgmScheme(KeyScheme):
    name = "rgm"

    def __init__(self, profile_a: VarianceProfile, profile_b: VarianceProfile, top_k: int = 1):
        self.profile_a = profile_a
        self.profile_b = profile_b
        self.top_k = top_k

    @classmethod
    def from_params(cls, params: RgmParams) -> "RgmScheme":
        return cls(params.profile_a, params.profile_b, params.top_k)

    def features(
        self, channels: ChannelSet, noise_var: float, rng: RngLike, round_index: int = 0
    ) -> RoundFeatures:
        obs = rgm_round(
            channels, self.profile_a, self.profile_b, noise_var, rng, round_index=round_index, top_k=self.top_k
        )
        return obs.to_features()
