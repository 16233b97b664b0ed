"""Sample-based mutual information estimators, in bits."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma
from scipy.stats import rankdata

from irs_skg.errors import DegenerateInputError, DimensionError

logger = logging.getLogger(__name__)

JITTER_SCALE = 1e-12
JITTER_SEED = 0x5EED


class MiMethod(str, Enum):
    HISTOGRAM = "histogram"
    KNN = "knn"
    MIXTURE_NUMERIC = "mixture_numeric"
    MC_LEAKAGE = "mc_leakage"


@dataclass
class MiEstimate:
    bits: float
    method: MiMethod
    sample_count: int
    diagnostics: dict[str, Any] = field(default_factory=dict)
    stderr: float = float("nan")
    flagged: bool = False  # estimate missed a target or relied on a subsample

    @property
    def negative(self) -> bool:
        """Raw estimate below zero; reported as is, never clamped."""
        return self.bits < 0

    @classmethod
    def exact_zero(cls, method: MiMethod, reason: str) -> "MiEstimate":
        return cls(bits=0.0, method=method, sample_count=0, diagnostics={"reason": reason}, stderr=0.0)


def _as_samples(values, name: str) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionError(f"{name} must be a sequence of scalars or vectors, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")
    if np.any(np.ptp(a, axis=0) == 0):
        raise DegenerateInputError(f"{name} has a constant coordinate")
    return a


def _check_pair(x: np.ndarray, y: np.ndarray) -> None:
    if len(x) != len(y):
        raise DimensionError(f"sample counts differ: {len(x)} vs {len(y)}")


def mi_histogram(x, y, bins: int = 8) -> MiEstimate:
    """Plug-in MI on an equal-frequency ``bins x bins`` grid.

    Needs at least ``10 * bins`` samples. ``diagnostics["bias"]`` is the
    first-order plug-in bias ``(bins - 1)^2 / (2 N ln 2)``.
    """
    xs = np.asarray(x, dtype=float).reshape(-1)
    ys = np.asarray(y, dtype=float).reshape(-1)
    _check_pair(xs, ys)
    n = xs.size
    if bins < 2:
        raise ValueError(f"need at least two bins, got {bins}")
    if n < 10 * bins:
        raise DegenerateInputError(f"need at least {10 * bins} samples for {bins} bins, got {n}")
    _as_samples(xs, "x")
    _as_samples(ys, "y")

    bx = ((rankdata(xs, method="ordinal") - 1) * bins) // n
    by = ((rankdata(ys, method="ordinal") - 1) * bins) // n
    joint = np.bincount(bx * bins + by, minlength=bins * bins).reshape(bins, bins) / n
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    bits = float(np.sum(joint[nz] * np.log2(joint[nz] / np.outer(px, py)[nz])))

    return MiEstimate(
        bits=bits,
        method=MiMethod.HISTOGRAM,
        sample_count=n,
        diagnostics={"bins": bins, "bias": (bins - 1) ** 2 / (2 * n * np.log(2))},
    )


def _jitter_duplicates(a: np.ndarray, salt: int) -> tuple[np.ndarray, bool]:
    """Break ties with uniform noise of ``1e-12 * range`` per coordinate, reproducibly.

    ``salt`` keeps the jitter of different variables independent.
    """
    if np.unique(a, axis=0).shape[0] == a.shape[0]:
        return a, False
    gen = np.random.default_rng((JITTER_SEED, salt))
    span = np.ptp(a, axis=0)
    return a + gen.uniform(0.0, JITTER_SCALE, size=a.shape) * span, True


def mi_knn(x, y, k: int = 3) -> MiEstimate:
    """Kraskov-Stoegbauer-Grassberger estimator (first variant, max-norm).

    Coordinates are standardised first. Duplicated samples are separated by a
    deterministic jitter of amplitude ``1e-12 * range``.
    """
    xs = _as_samples(x, "x")
    ys = _as_samples(y, "y")
    _check_pair(xs, ys)
    n = len(xs)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if n <= 10 * k:
        raise DegenerateInputError(f"need more than {10 * k} samples for k={k}, got {n}")

    xs = (xs - xs.mean(axis=0)) / xs.std(axis=0)
    ys = (ys - ys.mean(axis=0)) / ys.std(axis=0)
    xs, jx = _jitter_duplicates(xs, salt=0)
    ys, jy = _jitter_duplicates(ys, salt=1)
    joint = np.hstack([xs, ys])

    dist, _ = cKDTree(joint).query(joint, k=k + 1, p=np.inf)
    eps = dist[:, k]
    radius = np.nextafter(eps, 0)
    nx = cKDTree(xs).query_ball_point(xs, radius, p=np.inf, return_length=True) - 1
    ny = cKDTree(ys).query_ball_point(ys, radius, p=np.inf, return_length=True) - 1

    nats = digamma(k) + digamma(n) - np.mean(digamma(nx + 1) + digamma(ny + 1))
    bits = float(nats / np.log(2))
    if bits < 0:
        logger.debug("kNN MI estimate is negative (%.4f bits)", bits)
    return MiEstimate(
        bits=bits,
        method=MiMethod.KNN,
        sample_count=n,
        diagnostics={"k": k, "variant": "ksg1", "jittered": bool(jx or jy)},
    )
