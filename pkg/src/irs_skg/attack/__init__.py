"""Colluded-eavesdropper attack on the pilot baseline."""

from irs_skg.attack.colluded import (
    AttackResult,
    ColludedEveAttack,
    EveObservation,
    build_psi,
    estimate_w,
    nrmse,
    observe,
    project_unit_modulus,
    reconstruct_legitimate,
    stacked_rank,
)

__all__ = [
    "AttackResult",
    "ColludedEveAttack",
    "EveObservation",
    "build_psi",
    "estimate_w",
    "nrmse",
    "observe",
    "project_unit_modulus",
    "reconstruct_legitimate",
    "stacked_rank",
]
