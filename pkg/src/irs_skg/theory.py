"""Closed-form Gaussian approximations of the largest received singular value.

For a probe ``X`` with per-part variances ``delta^2[m, n]`` (rows summing to
``C``) and a channel ``H = U diag(xi) V^H``, ``sigma_max(H X)`` is close to
Gaussian for long probes. Its first two moments follow from

    a^2 + b        = S1    (mean of sigma^2)
    2 b^2 + 4 a^2 b = S2   (variance of sigma^2)

with ``a`` the mean and ``b`` the variance. Noise-free:

    S1 = 2 C xi^2,  S2 = 4 xi^4 sum_n s_n^2,  s_n = sum_m delta^2[m, n] |v_m|^2

where ``v`` is the dominant singular vector on the transmit side. Receiver
noise of per-part variance ``eps^2`` adds ``2 D eps^2`` to ``S1`` and
``8 C xi^2 eps^2 + 4 D eps^4`` to ``S2``.
"""

from dataclasses import dataclass

import numpy as np

from irs_skg import linalg
from irs_skg.errors import DimensionError, NumericalError
from irs_skg.sampling import VarianceProfile

UNIT_NORM_TOL = 1e-8


@dataclass(frozen=True)
class GaussianApprox:
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))

    @property
    def second_moment(self) -> float:
        return self.mean**2 + self.variance


@dataclass(frozen=True)
class MomentBounds:
    eta_min: float
    eta_max: float
    iota_sq_min: float
    iota_sq_max: float

    def contains(self, approx: GaussianApprox, rel_tol: float = 1e-12) -> bool:
        def within(x, lo, hi):
            slack = rel_tol * max(abs(lo), abs(hi), 1.0)
            return lo - slack <= x <= hi + slack

        return within(approx.mean, self.eta_min, self.eta_max) and within(
            approx.variance, self.iota_sq_min, self.iota_sq_max
        )


def solve_moments(s1: float, s2: float) -> GaussianApprox:
    """Mean and variance from the first two moments of ``sigma^2``."""
    disc = s1 * s1 - s2 / 2
    if disc < 0:
        raise NumericalError(f"negative radicand {disc:.3e} in moment equations")
    a_sq = np.sqrt(disc)
    b = s1 - a_sq
    if b < -1e-12 * max(s1, 1.0):
        raise NumericalError(f"moment equations give a negative variance {b:.3e}")
    return GaussianApprox(mean=float(np.sqrt(a_sq)), variance=float(max(b, 0.0)))


def _weight_column(column, profile: VarianceProfile) -> np.ndarray:
    v = np.asarray(column, dtype=np.complex128).reshape(-1)
    if v.size != profile.rows:
        raise DimensionError(f"singular vector has {v.size} entries but the profile has {profile.rows} rows")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"singular vector must have unit norm, got {np.linalg.norm(v):.6f}")
    return np.abs(v) ** 2


def column_weights(column, profile: VarianceProfile) -> np.ndarray:
    """``s_n = sum_m delta^2[m, n] |v_m|^2`` for every probe column ``n``."""
    return _weight_column(column, profile) @ profile.deltas


def noiseless_moments(xi1: float, v_column, profile: VarianceProfile) -> GaussianApprox:
    """Noise-free moments: ``eta = xi (4C^2 - 2 sum s^2)^{1/4}``, ``iota^2 = 2 C xi^2 - eta^2``."""
    s = column_weights(v_column, profile)
    c = profile.row_sum
    return solve_moments(2 * c * xi1**2, 4 * xi1**4 * float(np.sum(s**2)))


def noisy_moments(xi1: float, weight_column, profile: VarianceProfile, noise_var: float) -> GaussianApprox:
    """Moments with receiver noise; ``mean^2 + variance = 2 C xi^2 + 2 D eps^2``.

    Use the right singular vector of ``H_AB`` for Bob and the left one for Alice.
    """
    if noise_var < 0:
        raise ValueError(f"noise variance must be non-negative, got {noise_var}")
    s = column_weights(weight_column, profile)
    c = profile.row_sum
    d = profile.cols
    xi_sq = xi1**2
    s1 = 2 * c * xi_sq + 2 * d * noise_var
    s2 = 4 * xi_sq**2 * float(np.sum(s**2)) + 8 * c * xi_sq * noise_var + 4 * d * noise_var**2
    return solve_moments(s1, s2)


def moment_bounds(xi1: float, profile: VarianceProfile) -> MomentBounds:
    """Envelope of the noise-free moments over every unit weight vector."""
    c = profile.row_sum
    d4 = profile.deltas**2
    largest = float(np.sum(d4.max(axis=0)))
    smallest = float(np.sum(d4.min(axis=0)))
    wide = solve_moments(2 * c * xi1**2, 4 * xi1**4 * largest)
    narrow = solve_moments(2 * c * xi1**2, 4 * xi1**4 * smallest)
    return MomentBounds(
        eta_min=wide.mean,
        eta_max=narrow.mean,
        iota_sq_min=narrow.variance,
        iota_sq_max=wide.variance,
    )


def channel_moments(
    h_ab: np.ndarray,
    profile_a: VarianceProfile,
    profile_b: VarianceProfile,
    noise_var: float = 0.0,
) -> tuple[GaussianApprox, GaussianApprox]:
    """Predicted ``(sigma_A, sigma_B)`` approximations for one channel realisation."""
    svd = linalg.compact_svd(h_ab)
    if svd.rank == 0:
        raise NumericalError("legitimate channel is zero")
    bob = noisy_moments(svd.xi1, svd.right[:, 0], profile_a, noise_var)
    alice = noisy_moments(svd.xi1, svd.left[:, 0], profile_b, noise_var)
    return alice, bob
