"""Key generation schemes: the pilot baseline and random Gaussian matrix probing."""

from irs_skg.schemes.base import KeyScheme, RoundFeatures
from irs_skg.schemes.pilot import (
    FeatureMode,
    PilotMatrix,
    PilotScheme,
    ls_estimate,
    pilot_feature,
    received_pilot_signal,
)
from irs_skg.schemes.quantize import KeyBitstream, key_disagreement_rate, quantize, reconcile
from irs_skg.schemes.rgm import (
    ProbeMatrix,
    RgmParams,
    RgmScheme,
    SingularObservation,
    rgm_round,
    run_protocol,
    svd_multiplications,
)

__all__ = [
    "FeatureMode",
    "KeyBitstream",
    "KeyScheme",
    "PilotMatrix",
    "PilotScheme",
    "ProbeMatrix",
    "RgmParams",
    "RgmScheme",
    "RoundFeatures",
    "SingularObservation",
    "key_disagreement_rate",
    "ls_estimate",
    "pilot_feature",
    "quantize",
    "received_pilot_signal",
    "reconcile",
    "rgm_round",
    "run_protocol",
    "svd_multiplications",
]
