"""Secret key rate lower bound: key MI minus the larger of the two leakages."""

from dataclasses import dataclass

from irs_skg.infotheory.estimators import MiEstimate


@dataclass
class SkrEstimate:
    key_mi: MiEstimate
    leak_a: MiEstimate
    leak_b: MiEstimate
    skr_raw: float
    skr_clamped: float

    @property
    def leakage(self) -> MiEstimate:
        """The larger leakage term, the one the bound subtracts."""
        return self.leak_a if self.leak_a.bits >= self.leak_b.bits else self.leak_b

    @property
    def flagged(self) -> bool:
        return self.key_mi.flagged or self.leak_a.flagged or self.leak_b.flagged


def skr_lower_bound(key_mi: MiEstimate, leak_a: MiEstimate, leak_b: MiEstimate | None = None) -> SkrEstimate:
    """``R_s >= I(sigma_A; sigma_B) - max(leak_A, leak_B)`` in bits per coherence round.

    The raw value keeps its sign; ``skr_clamped`` is ``max(0, raw)``.
    """
    leak_b = leak_b if leak_b is not None else leak_a
    raw = key_mi.bits - max(leak_a.bits, leak_b.bits)
    return SkrEstimate(key_mi=key_mi, leak_a=leak_a, leak_b=leak_b, skr_raw=raw, skr_clamped=max(0.0, raw))
