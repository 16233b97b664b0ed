"""Key scheme interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from irs_skg.channel import ChannelSet
from irs_skg.sampling import IrsPhaseVector, PhaseAlphabet, RngLike, RngStream, Role, child, sample_irs_phase
from irs_skg.workers import parallel_map


@dataclass
class RoundFeatures:
    """Key material extracted by both legitimate ends in one coherence round."""

    round_index: int
    alice: np.ndarray
    bob: np.ndarray
    irs: IrsPhaseVector
    eve: np.ndarray | None = None  # what colluding Eves reconstruct, if the scheme models it
    metadata: dict[str, Any] = field(default_factory=dict)


def round_channels(channels: ChannelSet, alphabet: PhaseAlphabet, rng: RngLike, round_index: int):
    """Fresh IRS phase for round ``round_index`` and the stream the round draws from."""
    stream = child(rng, Role.ROUND, round_index)
    irs = sample_irs_phase(channels.n_r, alphabet, child(stream, Role.IRS))
    return channels.with_irs(irs), stream


class KeyScheme(ABC):
    """Base class for key generation schemes."""

    name: str

    @abstractmethod
    def features(
        self, channels: ChannelSet, noise_var: float, rng: RngLike, round_index: int = 0
    ) -> RoundFeatures:
        """Run one coherence round with the IRS phase already in ``channels``.

        Args:
            channels: Deployment with the round's IRS phase
            noise_var: Per-part receiver noise variance
            rng: Random source for probes or pilots and noise
            round_index: Position of the round in the run

        Returns:
            RoundFeatures for Alice and Bob
        """
        pass

    def batch_features(
        self,
        channels: ChannelSet,
        noise_var: float,
        rounds: int,
        alphabet: PhaseAlphabet,
        rng: RngLike,
        threads: int = 1,
    ) -> list[RoundFeatures]:
        """Run ``rounds`` rounds, each with a freshly drawn IRS phase.

        Threads are only used with an ``RngStream``; a shared generator runs
        sequentially.
        """
        if rounds < 1:
            raise ValueError(f"need at least one round, got {rounds}")

        def one(r: int) -> RoundFeatures:
            round_set, stream = round_channels(channels, alphabet, rng, r)
            return self.features(round_set, noise_var, stream, round_index=r)

        workers = threads if isinstance(rng, RngStream) else 1
        return parallel_map(one, range(rounds), workers)
