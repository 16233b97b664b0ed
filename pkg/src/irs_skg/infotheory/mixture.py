"""Mutual information of the common singular values under a Gaussian mixture.

Given IRS phase samples ``w_1..w_W`` with probabilities ``p``, each phase
yields Gaussian approximations for ``sigma_A`` and ``sigma_B`` that are
independent given ``w``. The marginals and the joint are finite mixtures:

    p(a, b) = sum_w p(w) N(a; mu_A(w), s_A(w)) N(b; mu_B(w), s_B(w))

and ``I(sigma_A; sigma_B)`` is integrated on a grid covering six standard
deviations around every component, doubling the grid until it settles.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.stats import norm

from irs_skg.channel import ChannelSet, cascaded_channel
from irs_skg.errors import QuadratureError
from irs_skg.infotheory.estimators import MiEstimate, MiMethod
from irs_skg.sampling import IrsPhaseVector, VarianceProfile
from irs_skg.theory import GaussianApprox, channel_moments

logger = logging.getLogger(__name__)

GRID_SPAN = 6.0
INITIAL_POINTS = 256
MAX_POINTS = 2048


def _grid(components: Sequence[GaussianApprox], points: int) -> np.ndarray:
    means = np.array([c.mean for c in components])
    stds = np.array([c.std for c in components])
    if np.any(stds <= 0):
        raise ValueError("mixture components need positive variance")
    return np.linspace(np.min(means - GRID_SPAN * stds), np.max(means + GRID_SPAN * stds), points)


def _densities(components: Sequence[GaussianApprox], grid: np.ndarray) -> np.ndarray:
    means = np.array([c.mean for c in components])[:, None]
    stds = np.array([c.std for c in components])[:, None]
    return norm.pdf(grid[None, :], loc=means, scale=stds)  # W x G


def _mixture_mi_on_grid(comp_a, comp_b, weights: np.ndarray, points: int) -> tuple[float, float, float]:
    ga = _grid(comp_a, points)
    gb = _grid(comp_b, points)
    da, db = ga[1] - ga[0], gb[1] - gb[0]
    dens_a = _densities(comp_a, ga)
    dens_b = _densities(comp_b, gb)

    joint = (dens_a.T * weights[None, :]) @ dens_b  # G x G
    pa = weights @ dens_a
    pb = weights @ dens_b
    outer = np.outer(pa, pb)
    nz = (joint > 0) & (outer > 0)
    bits = float(np.sum(joint[nz] * np.log2(joint[nz] / outer[nz])) * da * db)
    return bits, float(pa.sum() * da), float(pb.sum() * db)


def mixture_mi(
    components_a: Sequence[GaussianApprox],
    components_b: Sequence[GaussianApprox],
    weights=None,
    tol: float = 1e-6,
    initial_points: int = INITIAL_POINTS,
    max_points: int = MAX_POINTS,
) -> MiEstimate:
    """Numeric MI of a product-component Gaussian mixture.

    Raises:
        QuadratureError: when ``max_points`` is reached before successive grids
            agree to ``tol`` bits and the marginals integrate to 1 within ``tol``
    """
    if len(components_a) != len(components_b) or not components_a:
        raise ValueError("need the same non-zero number of components on both sides")
    n = len(components_a)
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or not np.isclose(w.sum(), 1.0):
        raise ValueError("weights must be a probability vector over the components")

    points = initial_points
    previous, _, _ = _mixture_mi_on_grid(components_a, components_b, w, points)
    change = float("inf")
    while True:
        points *= 2
        if points > max_points:
            raise QuadratureError(
                f"mixture MI did not settle to {tol:g} bits within {max_points} grid points",
                achieved_tolerance=change,
            )
        bits, mass_a, mass_b = _mixture_mi_on_grid(components_a, components_b, w, points)
        change = max(abs(bits - previous), abs(mass_a - 1.0), abs(mass_b - 1.0))
        if change <= tol:
            break
        previous = bits

    return MiEstimate(
        bits=bits,
        method=MiMethod.MIXTURE_NUMERIC,
        sample_count=n,
        diagnostics={
            "grid_points": points,
            "mass_a": mass_a,
            "mass_b": mass_b,
            "achieved_tolerance": change,
        },
    )


def mi_mixture_numeric(
    w_samples: Sequence[IrsPhaseVector],
    channels: ChannelSet,
    profile_a: VarianceProfile,
    profile_b: VarianceProfile,
    noise_var: float,
    **kwargs,
) -> MiEstimate:
    """``I(sigma_A; sigma_B)`` over equiprobable IRS phases using per-phase Gaussian moments."""
    if len(w_samples) < 1:
        raise ValueError("need at least one IRS phase sample")
    comp_a, comp_b = [], []
    for irs in w_samples:
        h_ab, _ = cascaded_channel(channels.with_irs(irs))
        alice, bob = channel_moments(h_ab, profile_a, profile_b, noise_var)
        comp_a.append(alice)
        comp_b.append(bob)
    estimate = mixture_mi(comp_a, comp_b, **kwargs)
    logger.debug("mixture MI over %d phases: %.4f bits", len(w_samples), estimate.bits)
    return estimate
