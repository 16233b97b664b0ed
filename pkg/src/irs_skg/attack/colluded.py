"""Colluded-Eve attack on the pilot baseline.

Eves know every direct link and Alice's pilot. Eve ``m`` removes the direct
term from its received pilot block, ``Z_m = Y_Em - G_AEm P``, which is linear
in the IRS vector:

    vec(Z_m) = Psi_m w + noise,  block l of Psi_m = G_REm diag(G_AR p_l)

A single Eve's ``Psi_m`` is usually rank deficient. Stacking ``M`` Eves and
solving by least squares recovers ``w`` once the stack reaches rank ``N_R``,
after which the legitimate channel follows from the cascade formula.
"""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from irs_skg import linalg
from irs_skg.channel import ChannelSet, cascaded_channel, eve_channel
from irs_skg.errors import DegenerateInputError, DimensionError
from irs_skg.sampling import RngLike, child, noise_matrix
from irs_skg.schemes.pilot import PilotMatrix

logger = logging.getLogger(__name__)

SUCCESS_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EveObservation:
    z: np.ndarray  # N_E x L_A, direct term removed
    psi: np.ndarray  # (L_A N_E) x N_R


def build_psi(g_re: np.ndarray, g_ar: np.ndarray, pilot: PilotMatrix) -> np.ndarray:
    """Stack ``G_RE diag(G_AR p_l)`` over the pilot columns ``p_l``."""
    g_re = linalg.as_matrix(g_re, "G_RE")
    g_ar = linalg.as_matrix(g_ar, "G_AR")
    if g_re.shape[1] != g_ar.shape[0] or g_ar.shape[1] != pilot.n_antennas:
        raise DimensionError(
            f"G_RE {g_re.shape}, G_AR {g_ar.shape} and pilot {pilot.matrix.shape} do not conform"
        )
    reflected = g_ar @ pilot.matrix  # N_R x L_A, column l is G_AR p_l
    return np.vstack([g_re * reflected[:, col][None, :] for col in range(pilot.length)])


def observe(
    channels: ChannelSet,
    m: int,
    pilot: PilotMatrix,
    noise_var: float,
    rng: RngLike,
) -> EveObservation:
    """Eve ``m`` overhears Alice's pilot and strips the known direct term."""
    y = eve_channel(channels, m) @ pilot.matrix
    if noise_var > 0:
        y = y + noise_matrix(*y.shape, noise_var, rng)
    eve = channels.eves[m]
    z = y - eve.g_ae.matrix @ pilot.matrix
    return EveObservation(z=z, psi=build_psi(eve.g_re.matrix, channels.g_ar.matrix, pilot))


def _stack(observations: list[EveObservation]) -> tuple[np.ndarray, np.ndarray]:
    if not observations:
        raise ValueError("need at least one Eve observation")
    psi = np.vstack([o.psi for o in observations])
    z = np.vstack([linalg.vec(o.z) for o in observations])
    return psi, z


def estimate_w(observations: list[EveObservation]) -> np.ndarray:
    """Plain least-squares IRS vector ``(stacked Psi)^+ (stacked vec Z)``, length ``N_R``."""
    psi, z = _stack(observations)
    return (linalg.pinv(psi) @ z).reshape(-1)


def stacked_rank(observations: list[EveObservation], tol: float = SUCCESS_RANK_TOL) -> int:
    psi, _ = _stack(observations)
    return linalg.rank(psi, tol)


def project_unit_modulus(w: np.ndarray) -> np.ndarray:
    """Nearest unit-modulus vector; zero entries map to 1."""
    w = np.asarray(w, dtype=np.complex128)
    mag = np.abs(w)
    return np.where(mag > 0, w / np.where(mag > 0, mag, 1.0), 1.0 + 0j)


def reconstruct_legitimate(w_hat: np.ndarray, channels: ChannelSet) -> np.ndarray:
    """``G_RB diag(w_hat) G_AR + G_AB``."""
    w_hat = np.asarray(w_hat, dtype=np.complex128).reshape(-1)
    if w_hat.size != channels.n_r:
        raise DimensionError(f"estimate has {w_hat.size} entries but the IRS has {channels.n_r}")
    return (channels.g_rb.matrix * w_hat[None, :]) @ channels.g_ar.matrix + channels.g_ab.matrix


def nrmse(h_hat: np.ndarray, h: np.ndarray) -> float:
    """``||H_hat - H||_F / ||H||_F``."""
    h_hat = np.asarray(h_hat)
    h = np.asarray(h)
    if h_hat.shape != h.shape:
        raise DimensionError(f"shapes differ: {h_hat.shape} vs {h.shape}")
    ref = np.linalg.norm(h)
    if ref == 0:
        raise DegenerateInputError("NRMSE is undefined for a zero reference channel")
    return float(np.linalg.norm(h_hat - h) / ref)


@dataclass
class AttackResult:
    w_hat: np.ndarray
    h_hat: np.ndarray
    nrmse: float
    psi_rank: int
    n_elements: int
    n_eves: int
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def full_rank(self) -> bool:
        """Whether the stacked system pins down every IRS element."""
        return self.psi_rank >= self.n_elements

    def summary(self) -> str:
        lines = [
            f"Eves: {self.n_eves}",
            f"Stacked rank: {self.psi_rank}/{self.n_elements}" + (" (full)" if self.full_rank else ""),
            f"NRMSE: {self.nrmse:.3e}",
        ]
        return "\n".join(lines)


class ColludedEveAttack:
    """Pool every Eve's pilot observation and reconstruct ``H_AB``."""

    def __init__(
        self,
        pilot: PilotMatrix,
        project: bool = False,
        rank_tol: float = SUCCESS_RANK_TOL,
    ):
        """Initialize the attack.

        Args:
            pilot: Alice's public pilot
            project: Snap the LS estimate onto unit-modulus entries
            rank_tol: Relative tolerance for the success rank test
        """
        self.pilot = pilot
        self.project = project
        self.rank_tol = rank_tol

    def run(self, channels: ChannelSet, noise_var: float, rng: RngLike) -> AttackResult:
        if channels.n_eves == 0:
            raise ValueError("the attack needs at least one Eve")
        observations = [
            observe(channels, m, self.pilot, noise_var, child(rng, m)) for m in range(channels.n_eves)
        ]
        w_hat = estimate_w(observations)
        if self.project:
            w_hat = project_unit_modulus(w_hat)
        h_hat = reconstruct_legitimate(w_hat, channels)
        h_ab, _ = cascaded_channel(channels)
        rank = stacked_rank(observations, self.rank_tol)

        result = AttackResult(
            w_hat=w_hat,
            h_hat=h_hat,
            nrmse=nrmse(h_hat, h_ab),
            psi_rank=rank,
            n_elements=channels.n_r,
            n_eves=channels.n_eves,
            diagnostics={
                "w_error": float(np.linalg.norm(w_hat - channels.irs.w) / np.sqrt(channels.n_r)),
                "projected": self.project,
            },
        )
        logger.debug("colluded attack: %s", result.summary().replace("\n", ", "))
        return result
