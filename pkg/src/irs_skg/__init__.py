"""irs-skg - IRS-assisted physical-layer secret key generation simulator."""

from irs_skg.attack import AttackResult, ColludedEveAttack
from irs_skg.channel import ChannelSet, Party, Topology, build_channel_set, cascaded_channel
from irs_skg.errors import (
    ConfigError,
    DegenerateInputError,
    DimensionError,
    IrsSkgError,
    NumericalError,
    QuadratureError,
    RankDeficientError,
    SvdConvergenceError,
)
from irs_skg.infotheory import MiEstimate, leakage_upper_bound, mi_knn, skr_lower_bound
from irs_skg.sampling import IrsPhaseVector, PhaseAlphabet, RngStream, VarianceProfile
from irs_skg.schemes import PilotMatrix, PilotScheme, RgmParams, RgmScheme, reconcile, rgm_round, run_protocol
from irs_skg.theory import GaussianApprox, channel_moments, moment_bounds, noiseless_moments, noisy_moments

__version__ = "0.1.0"
__all__ = [
    "AttackResult",
    "ChannelSet",
    "ColludedEveAttack",
    "ConfigError",
    "DegenerateInputError",
    "DimensionError",
    "GaussianApprox",
    "IrsPhaseVector",
    "IrsSkgError",
    "MiEstimate",
    "NumericalError",
    "Party",
    "PhaseAlphabet",
    "PilotMatrix",
    "PilotScheme",
    "QuadratureError",
    "RankDeficientError",
    "RgmParams",
    "RgmScheme",
    "RngStream",
    "SvdConvergenceError",
    "Topology",
    "VarianceProfile",
    "build_channel_set",
    "cascaded_channel",
    "channel_moments",
    "leakage_upper_bound",
    "mi_knn",
    "moment_bounds",
    "noiseless_moments",
    "noisy_moments",
    "reconcile",
    "rgm_round",
    "run_protocol",
    "skr_lower_bound",
]
