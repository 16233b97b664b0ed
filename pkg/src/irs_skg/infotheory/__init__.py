"""Mutual information estimators, leakage bounds and secret key rates."""

from irs_skg.infotheory.estimators import MiEstimate, MiMethod, mi_histogram, mi_knn
from irs_skg.infotheory.leakage import InnerMode, LeakageSettings, leakage_upper_bound
from irs_skg.infotheory.mixture import mi_mixture_numeric, mixture_mi
from irs_skg.infotheory.skr import SkrEstimate, skr_lower_bound

__all__ = [
    "InnerMode",
    "LeakageSettings",
    "MiEstimate",
    "MiMethod",
    "SkrEstimate",
    "leakage_upper_bound",
    "mi_histogram",
    "mi_knn",
    "mi_mixture_numeric",
    "mixture_mi",
    "skr_lower_bound",
]
