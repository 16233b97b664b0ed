"""Randomness for the simulator.

Every random draw goes through a ``numpy.random.Generator``. Callers either
pass a generator directly or an :class:`RngStream`, a (seed, stream id) pair
that always yields the same sequence. Streams derive children from integer
keys (trial, role, round, ...) so parallel Monte-Carlo trials never share
state and never depend on scheduling order.
"""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Union

import numpy as np

from irs_skg.errors import ConfigError, DimensionError


class Role(IntEnum):
    """Stream keys for the independent random sources of one trial."""

    CHANNEL = 0
    IRS = 1
    PROBE_A = 2
    PROBE_B = 3
    NOISE_A = 4
    NOISE_B = 5
    NOISE_E = 6
    PILOT = 7
    CALIBRATION = 8
    LEAKAGE = 9
    ROUND = 10
    TRIAL = 11


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")

    def _sequence(self, *keys: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *keys))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self._sequence()))

    def derive(self, *keys: int) -> "RngStream":
        """Child stream for the given integer keys, e.g. ``derive(trial, Role.NOISE_B)``."""
        state = self._sequence(*(int(k) for k in keys)).generate_state(1, dtype=np.uint64)
        return RngStream(seed=self.seed, stream_id=int(state[0]))

    @property
    def lineage(self) -> str:
        return f"{self.seed}:{self.stream_id:016x}"


RngLike = Union[np.random.Generator, RngStream]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected numpy Generator or RngStream, got {type(rng).__name__}")


def child(rng: RngLike, *keys: int) -> RngLike:
    """Derive a keyed child from a stream; a plain generator is returned as is."""
    if isinstance(rng, RngStream):
        return rng.derive(*keys)
    return rng


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Per-entry real/imaginary variances ``delta^2[m, n]`` with every row summing to ``row_sum``."""

    deltas: np.ndarray
    row_sum: float

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise DimensionError(f"variance profile must be a non-empty 2-D array, got shape {d.shape}")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ConfigError("variance profile entries must be finite and non-negative")
        if self.row_sum < 0:
            raise ConfigError(f"row sum must be non-negative, got {self.row_sum}")
        sums = d.sum(axis=1)
        if np.any(np.abs(sums - self.row_sum) > 1e-12 * max(self.row_sum, np.finfo(float).tiny)):
            raise ConfigError(f"every profile row must sum to {self.row_sum}; got row sums {sums}")
        d.setflags(write=False)
        object.__setattr__(self, "deltas", d)

    @classmethod
    def uniform(cls, rows: int, cols: int, row_sum: float = 1.0) -> "VarianceProfile":
        return cls(np.full((rows, cols), row_sum / cols), row_sum)

    @classmethod
    def random(cls, rows: int, cols: int, rng: RngLike, row_sum: float = 1.0) -> "VarianceProfile":
        """Non-uniform profile with exponential weights normalised to ``row_sum`` per row."""
        weights = as_generator(rng).exponential(size=(rows, cols))
        weights = weights / weights.sum(axis=1, keepdims=True) * row_sum
        # renormalise the last column so the row sums are exact to rounding
        weights[:, -1] = row_sum - weights[:, :-1].sum(axis=1)
        return cls(np.clip(weights, 0.0, None), row_sum)

    @property
    def rows(self) -> int:
        return self.deltas.shape[0]

    @property
    def cols(self) -> int:
        return self.deltas.shape[1]

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.deltas == self.deltas[0, 0]))


class PhaseKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class PhaseAlphabet:
    """Where IRS phases come from: uniform on ``[0, 2pi)`` or ``{2 pi k / K}``."""

    kind: PhaseKind = PhaseKind.CONTINUOUS
    levels: int = 8

    def __post_init__(self):
        object.__setattr__(self, "kind", PhaseKind(self.kind))
        if self.kind is PhaseKind.DISCRETE and self.levels < 2:
            raise ConfigError(f"discrete phase alphabet needs at least two levels, got {self.levels}")

    @classmethod
    def continuous(cls) -> "PhaseAlphabet":
        return cls(PhaseKind.CONTINUOUS)

    @classmethod
    def discrete(cls, levels: int = 8) -> "PhaseAlphabet":
        return cls(PhaseKind.DISCRETE, levels)

    @property
    def is_discrete(self) -> bool:
        return self.kind is PhaseKind.DISCRETE


@dataclass(frozen=True, eq=False)
class IrsPhaseVector:
    """IRS reflection phases ``theta``; unit-modulus coefficients ``w = exp(j theta)``."""

    phases: np.ndarray
    levels: int | None = None  # K for a discrete alphabet

    def __post_init__(self):
        p = np.mod(np.asarray(self.phases, dtype=float).reshape(-1), 2 * np.pi)
        if p.size < 1:
            raise DimensionError("IRS phase vector must have at least one element")
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    @classmethod
    def from_indices(cls, indices, levels: int) -> "IrsPhaseVector":
        idx = np.asarray(indices, dtype=int)
        return cls(2 * np.pi * idx / levels, levels)

    @property
    def w(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    @property
    def n_elements(self) -> int:
        return self.phases.size

    @property
    def indices(self) -> np.ndarray:
        if self.levels is None:
            raise ValueError("phase indices only exist for a discrete alphabet")
        return np.rint(self.phases * self.levels / (2 * np.pi)).astype(int) % self.levels


def complex_normal(shape: tuple[int, ...], variance, rng: RngLike) -> np.ndarray:
    """Circular complex Gaussian draws with per-part variance ``variance`` (broadcastable)."""
    gen = as_generator(rng)
    std = np.sqrt(np.broadcast_to(np.asarray(variance, dtype=float), shape))
    return gen.standard_normal(shape) * std + 1j * (gen.standard_normal(shape) * std)


def complex_gaussian_matrix(profile: VarianceProfile, rng: RngLike) -> np.ndarray:
    """Matrix whose entry ``(m, n)`` has real and imaginary parts of variance ``delta^2[m, n]``."""
    return complex_normal(profile.deltas.shape, profile.deltas, rng)


def sample_irs_phase(n_elements: int, alphabet: PhaseAlphabet, rng: RngLike) -> IrsPhaseVector:
    if n_elements < 1:
        raise ConfigError(f"IRS needs at least one element, got {n_elements}")
    gen = as_generator(rng)
    if alphabet.is_discrete:
        return IrsPhaseVector.from_indices(gen.integers(0, alphabet.levels, size=n_elements), alphabet.levels)
    return IrsPhaseVector(gen.uniform(0.0, 2 * np.pi, size=n_elements))


def noise_matrix(rows: int, cols: int, noise_var: float, rng: RngLike) -> np.ndarray:
    """Receiver noise with i.i.d. entries, per-part variance ``noise_var``."""
    if noise_var < 0:
        raise ConfigError(f"noise variance must be non-negative, got {noise_var}")
    return complex_normal((rows, cols), noise_var, rng)
