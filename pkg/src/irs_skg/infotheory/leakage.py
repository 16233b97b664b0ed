"""Monte-Carlo upper bound on what colluding Eves learn about the IRS phase.

Eves observe ``Z_E = H_eve(w) X + N_E`` with ``X`` a secret Gaussian probe.
Key leakage ``I(Z_E; sigma)`` is bounded by ``I(Z_E; w)``, which is estimated
over a discrete phase alphabet:

    I(Z_E; w) = E[ log2 p(Z_E | w) - log2 p(Z_E) ],  p(Z_E) = sum_w' p(w') p(Z_E | w')

All likelihoods stay in the log domain. ``p(Z_E | w)`` is evaluated one of
three ways:

* ``analytic``: every column of ``Z_E`` is exactly
  ``CN(0, H_eve diag(2 delta^2_n) H_eve^H + 2 eps^2 I)``.
* ``nested``: Monte-Carlo average of ``p(Z_E | X, w)`` over shared probe draws.
* known probe: ``X`` is public, so ``p(Z_E | w)`` is a plain Gaussian around
  ``H_eve(w) X``. Used as a deterministic-channel check.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from irs_skg import linalg
from irs_skg.channel import ChannelSet, Party
from irs_skg.errors import ConfigError, DegenerateInputError, DimensionError, NumericalError
from irs_skg.infotheory.estimators import MiEstimate, MiMethod
from irs_skg.sampling import (
    RngLike,
    Role,
    VarianceProfile,
    as_generator,
    child,
    complex_gaussian_matrix,
    complex_normal,
)

logger = logging.getLogger(__name__)


class InnerMode(str, Enum):
    NESTED = "nested"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class LeakageSettings:
    levels: int = 2  # K, size of the phase alphabet
    mc_samples: int = 64
    inner_mode: InnerMode = InnerMode.NESTED
    inner_samples: int = 32
    max_hypotheses: int = 4096
    target_stderr: float = 0.05
    chunk: int = 256

    def __post_init__(self):
        object.__setattr__(self, "inner_mode", InnerMode(self.inner_mode))
        if self.levels < 1:
            raise ValueError(f"phase alphabet needs at least one level, got {self.levels}")
        if self.mc_samples < 2:
            raise ValueError(f"need at least two Monte-Carlo samples, got {self.mc_samples}")
        if self.inner_samples < 1 or self.max_hypotheses < 2 or self.chunk < 1:
            raise ValueError("inner_samples, max_hypotheses and chunk must be positive")


class _EveModel:
    """Batched ``H_eve(w)`` for many phase hypotheses at once."""

    def __init__(self, channels: ChannelSet, transmitter: Party):
        self.g_re = np.vstack([e.g_re.matrix for e in channels.eves])  # n x N_R
        if Party(transmitter) is Party.ALICE:
            self.g_in = channels.g_ar.matrix
            self.g_direct = np.vstack([e.g_ae.matrix for e in channels.eves])
        else:
            if any(e.g_be is None for e in channels.eves):
                raise ConfigError("every Eve needs a direct link from Bob")
            self.g_in = channels.g_rb.matrix.conj().T
            self.g_direct = np.vstack([e.g_be.matrix for e in channels.eves])

    @property
    def n_rx(self) -> int:
        return self.g_re.shape[0]

    @property
    def n_tx(self) -> int:
        return self.g_in.shape[1]

    def channels(self, indices: np.ndarray, levels: int) -> np.ndarray:
        w = np.exp(2j * np.pi * indices / levels)  # B x N_R
        return np.einsum("rk,bk,kt->brt", self.g_re, w, self.g_in) + self.g_direct[None, :, :]


def _ll_analytic(h: np.ndarray, z: np.ndarray, profile: VarianceProfile, noise_var: float) -> np.ndarray:
    """``log p(Z_s | w_b)`` for samples ``z`` (S, n, D) and channels ``h`` (B, n, N_tx)."""
    n = h.shape[1]
    ll = np.zeros((z.shape[0], h.shape[0]))
    columns, groups = np.unique(profile.deltas.T, axis=0, return_inverse=True)
    groups = np.asarray(groups).reshape(-1)
    for g, column in enumerate(columns):
        cols = np.flatnonzero(groups == g)
        sigma = np.einsum("brt,t,bst->brs", h, 2 * column, h.conj()) + 2 * noise_var * np.eye(n)[None]
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("received-column covariance is not positive definite") from exc
        logdet = 2 * np.sum(np.log(np.real(np.diagonal(chol, axis1=1, axis2=2))), axis=1)
        chol_inv = np.linalg.inv(chol)
        sigma_inv = np.conj(np.swapaxes(chol_inv, 1, 2)) @ chol_inv
        zg = z[:, :, cols]
        gram = zg @ np.conj(np.swapaxes(zg, 1, 2))  # S x n x n
        quad = np.real(np.einsum("bij,sji->sb", sigma_inv, gram))
        ll += -cols.size * (n * np.log(np.pi) + logdet[None, :]) - quad
    return ll


def _ll_nested(h: np.ndarray, z: np.ndarray, probes: np.ndarray, noise_var: float) -> np.ndarray:
    """``log mean_i p(Z_s | X_i, w_b)`` over probe draws ``probes`` (I, N_tx, D)."""
    n, d = z.shape[1], z.shape[2]
    const = -n * d * np.log(2 * np.pi * noise_var)
    z_energy = np.sum(np.abs(z) ** 2, axis=(1, 2))  # S
    hz = np.einsum("brt,srd->sbtd", h.conj(), z)  # H^H Z
    cross = np.real(np.einsum("sbtd,itd->sbi", hz.conj(), probes))
    gram = np.einsum("brt,bru->btu", h.conj(), h)  # H^H H
    hx_energy = np.real(np.einsum("itd,btu,iud->bi", probes.conj(), gram, probes))
    residual = z_energy[:, None, None] - 2 * cross + hx_energy[None, :, :]
    inner = const - residual / (2 * noise_var)
    return logsumexp(inner, axis=2) - np.log(probes.shape[0])


def leakage_upper_bound(
    channels: ChannelSet,
    profile: VarianceProfile,
    noise_var: float,
    rng: RngLike,
    settings: LeakageSettings | None = None,
    transmitter: Party = Party.ALICE,
    known_probe: np.ndarray | None = None,
) -> MiEstimate:
    """Estimate ``I(Z_E; w)`` in bits with its standard error.

    ``profile`` describes the transmitter's probe. The estimate is flagged
    when the hypothesis set had to be subsampled or the standard error
    exceeds ``settings.target_stderr``.
    """
    settings = settings or LeakageSettings()
    k = settings.levels
    if k == 1:
        return MiEstimate.exact_zero(MiMethod.MC_LEAKAGE, "single-symbol phase alphabet")
    if channels.n_eves == 0:
        raise ValueError("leakage needs at least one Eve")

    model = _EveModel(channels, transmitter)
    if profile.rows != model.n_tx:
        raise DimensionError(f"probe profile has {profile.rows} rows but the transmitter has {model.n_tx} antennas")
    if known_probe is not None:
        known_probe = linalg.as_matrix(known_probe, "known probe")
        if known_probe.shape != profile.deltas.shape:
            raise DimensionError(f"known probe must be {profile.deltas.shape}, got {known_probe.shape}")
    analytic = known_probe is None and settings.inner_mode is InnerMode.ANALYTIC
    if noise_var <= 0 and not analytic:
        raise DegenerateInputError("probe-conditioned likelihoods need positive noise variance")

    gen = as_generator(child(rng, Role.LEAKAGE))
    n_r = channels.n_r
    total = k**n_r
    enumerated = total <= settings.max_hypotheses
    if enumerated:
        hypotheses = np.array(list(itertools.product(range(k), repeat=n_r)), dtype=int)
    else:
        hypotheses = gen.integers(0, k, size=(settings.max_hypotheses - 1, n_r))

    s = settings.mc_samples
    true_idx = gen.integers(0, k, size=(s, n_r))
    h_true = model.channels(true_idx, k)
    if known_probe is not None:
        x = np.broadcast_to(known_probe, (s, *known_probe.shape))
    else:
        x = np.stack([complex_gaussian_matrix(profile, gen) for _ in range(s)])
    z = h_true @ x + complex_normal((s, model.n_rx, profile.cols), noise_var, gen)

    if known_probe is not None:
        probes = known_probe[None]
    elif not analytic:
        probes = np.stack([complex_gaussian_matrix(profile, gen) for _ in range(settings.inner_samples)])

    def log_likelihood(indices: np.ndarray, samples: np.ndarray) -> np.ndarray:
        out = []
        for start in range(0, len(indices), settings.chunk):
            h = model.channels(indices[start : start + settings.chunk], k)
            if analytic:
                out.append(_ll_analytic(h, samples, profile, noise_var))
            else:
                out.append(_ll_nested(h, samples, probes, noise_var))
        return np.concatenate(out, axis=1)

    ll_set = log_likelihood(hypotheses, z)  # S x H
    if enumerated:
        flat = np.ravel_multi_index(tuple(true_idx.T), (k,) * n_r)
        ll_true = ll_set[np.arange(s), flat]
        log_pz = logsumexp(ll_set, axis=1) - np.log(len(hypotheses))
    else:
        ll_true = np.array([log_likelihood(true_idx[i : i + 1], z[i : i + 1])[0, 0] for i in range(s)])
        pooled = np.hstack([ll_set, ll_true[:, None]])
        log_pz = logsumexp(pooled, axis=1) - np.log(pooled.shape[1])

    contributions = (ll_true - log_pz) / np.log(2)
    bits = float(np.mean(contributions))
    stderr = float(np.std(contributions, ddof=1) / np.sqrt(s))
    flagged = (not enumerated) or stderr > settings.target_stderr
    if flagged:
        logger.warning(
            "leakage estimate flagged: %.3f +/- %.3f bits (%s hypotheses%s)",
            bits,
            stderr,
            len(hypotheses),
            "" if enumerated else ", subsampled",
        )

    return MiEstimate(
        bits=bits,
        method=MiMethod.MC_LEAKAGE,
        sample_count=s,
        stderr=stderr,
        flagged=flagged,
        diagnostics={
            "hypotheses": int(len(hypotheses) + (0 if enumerated else 1)),
            "enumerated": enumerated,
            "inner_mode": "known_probe" if known_probe is not None else settings.inner_mode.value,
            "phase_entropy_bits": n_r * float(np.log2(k)),
            "transmitter": Party(transmitter).value,
        },
    )
