"""Narrow-band geometric channels between antenna arrays.

A direct channel from a transmitter array to a receiver array is the sum of
``L`` rank-one path terms ``g_l f_rx(aoa_l) f_tx(aod_l)^H`` scaled by
``sqrt(N_tx N_rx / rho)``. The matrix is ``N_rx x N_tx``.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from irs_skg.errors import ConfigError
from irs_skg.sampling import RngLike, as_generator, complex_normal


class ArrayKind(str, Enum):
    ULA = "ula"
    UPA = "upa"


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear or planar array; a ULA is the ``1 x y`` special case."""

    kind: ArrayKind
    x: int
    y: int
    spacing: float | None = None  # defaults to half a wavelength
    wavelength: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ArrayKind(self.kind))
        if self.kind is ArrayKind.ULA and self.x != 1:
            raise ConfigError(f"a ULA has x = 1, got x = {self.x}")
        if self.x < 1 or self.y < 1:
            raise ConfigError(f"array dimensions must be positive, got {self.x}x{self.y}")
        if self.wavelength <= 0:
            raise ConfigError(f"wavelength must be positive, got {self.wavelength}")
        if self.spacing is None:
            object.__setattr__(self, "spacing", self.wavelength / 2)
        elif self.spacing <= 0:
            raise ConfigError(f"element spacing must be positive, got {self.spacing}")

    @classmethod
    def ula(cls, n: int, wavelength: float = 1.0, spacing: float | None = None) -> "ArrayGeometry":
        return cls(ArrayKind.ULA, 1, n, spacing, wavelength)

    @classmethod
    def upa(cls, x: int, y: int, wavelength: float = 1.0, spacing: float | None = None) -> "ArrayGeometry":
        return cls(ArrayKind.UPA, x, y, spacing, wavelength)

    @property
    def size(self) -> int:
        return self.x * self.y


@dataclass(frozen=True)
class PathParams:
    """One propagation path: complex gain plus arrival and departure angles in radians."""

    gain: complex
    aoa_azimuth: float
    aoa_elevation: float
    aod_azimuth: float
    aod_elevation: float


@dataclass(frozen=True)
class PathStats:
    """How random paths are drawn when a channel is synthesised."""

    min_paths: int = 1
    max_paths: int = 10
    path_loss: float = 1.0
    los_gain: complex = 1.0

    def __post_init__(self):
        if not 1 <= self.min_paths <= self.max_paths:
            raise ConfigError(f"need 1 <= min_paths <= max_paths, got {self.min_paths}..{self.max_paths}")
        if self.path_loss <= 0:
            raise ConfigError(f"path loss must be positive, got {self.path_loss}")


@dataclass(frozen=True, eq=False)
class DirectChannel:
    matrix: np.ndarray  # N_rx x N_tx
    path_loss: float = 1.0
    paths: tuple[PathParams, ...] = field(default_factory=tuple)

    @property
    def n_rx(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_tx(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def zeros(cls, n_rx: int, n_tx: int) -> "DirectChannel":
        return cls(np.zeros((n_rx, n_tx), dtype=np.complex128))


def array_response(geom: ArrayGeometry, azimuth: float, elevation: float) -> np.ndarray:
    """Steering vector ``[e^{j i u}]_i kron [e^{j k v}]_k`` as an ``(x*y, 1)`` column.

    A ULA is evaluated at elevation pi/2 whatever ``elevation`` says.
    """
    if geom.kind is ArrayKind.ULA:
        elevation = np.pi / 2
    scale = 2 * np.pi * geom.spacing / geom.wavelength
    u = scale * np.cos(elevation)
    v = scale * np.sin(elevation) * np.sin(azimuth)
    fx = np.exp(1j * u * np.arange(geom.x))
    fy = np.exp(1j * v * np.arange(geom.y))
    return np.kron(fx, fy).reshape(-1, 1)


def geometric_channel(
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    paths: list[PathParams],
    path_loss: float = 1.0,
) -> DirectChannel:
    if not paths:
        raise ConfigError("a geometric channel needs at least one path")
    if path_loss <= 0:
        raise ConfigError(f"path loss must be positive, got {path_loss}")

    g = np.zeros((rx.size, tx.size), dtype=np.complex128)
    for p in paths:
        f_rx = array_response(rx, p.aoa_azimuth, p.aoa_elevation)
        f_tx = array_response(tx, p.aod_azimuth, p.aod_elevation)
        g += p.gain * (f_rx @ f_tx.conj().T)
    g *= np.sqrt(tx.size * rx.size / path_loss)
    return DirectChannel(matrix=g, path_loss=path_loss, paths=tuple(paths))


def random_paths(stats: PathStats, rng: RngLike, n_paths: int | None = None) -> list[PathParams]:
    """First path is line-of-sight with gain ``los_gain``; the rest are CN(0, 1) gains."""
    gen = as_generator(rng)
    if n_paths is None:
        n_paths = int(gen.integers(stats.min_paths, stats.max_paths + 1))
    angles = gen.uniform(0.0, 2 * np.pi, size=(n_paths, 4))
    gains = complex_normal((n_paths,), 0.5, gen)
    gains[0] = stats.los_gain
    return [PathParams(complex(g), *map(float, a)) for g, a in zip(gains, angles)]


def random_direct_channel(
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    stats: PathStats,
    rng: RngLike,
) -> DirectChannel:
    gen = as_generator(rng)
    return geometric_channel(tx, rx, random_paths(stats, gen), stats.path_loss)
