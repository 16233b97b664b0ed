"""Quantile quantizer with Gray-coded bins and guard-band censoring.

Bins are equal-probability intervals of the pooled value sequence. A value
lying within ``guard * width`` of an interior edge is censored. Both sides
publish their censored round indices and drop the union, so the censoring
decision depends only on the published edges.
"""

from dataclasses import dataclass

import numpy as np

from irs_skg.errors import DegenerateInputError, DimensionError


@dataclass(frozen=True, eq=False)
class KeyBitstream:
    """Bits of the kept rounds, one row of ``bits_per_sample`` bits per round."""

    symbols: np.ndarray  # (n_kept, bits_per_sample) uint8
    kept_rounds: np.ndarray  # round indices of the rows above
    censored_rounds: frozenset[int]
    bits_per_sample: int
    edges: np.ndarray

    @property
    def bits(self) -> np.ndarray:
        return self.symbols.reshape(-1)

    @property
    def n_rounds(self) -> int:
        return len(self.kept_rounds) + len(self.censored_rounds)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)


def gray_code(index: np.ndarray) -> np.ndarray:
    index = np.asarray(index, dtype=np.int64)
    return index ^ (index >> 1)


def _to_bits(codes: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def quantile_edges(values, bits_per_sample: int) -> np.ndarray:
    """``2^b + 1`` edges from the sample minimum to the maximum."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size < 1:
        raise DegenerateInputError("cannot quantize an empty sequence")
    if bits_per_sample < 1:
        raise ValueError(f"bits_per_sample must be at least 1, got {bits_per_sample}")
    if np.ptp(v) == 0:
        raise DegenerateInputError("cannot quantize a constant sequence")
    return np.quantile(v, np.linspace(0.0, 1.0, 2**bits_per_sample + 1))


def bin_index(values, edges: np.ndarray) -> np.ndarray:
    return np.searchsorted(edges[1:-1], np.asarray(values, dtype=float), side="right")


def censored_mask(values, edges: np.ndarray, guard: float) -> np.ndarray:
    """True where a value falls inside the guard band of an interior edge."""
    if not 0 <= guard < 0.5:
        raise ValueError(f"guard ratio must lie in [0, 0.5), got {guard}")
    v = np.asarray(values, dtype=float).reshape(-1)
    if guard == 0:
        return np.zeros(v.size, dtype=bool)
    widths = np.diff(edges)
    interior = edges[1:-1]
    half = guard * np.minimum(widths[:-1], widths[1:])
    return np.any(np.abs(v[:, None] - interior[None, :]) < half[None, :], axis=1)


def quantize_with_edges(values, edges: np.ndarray, bits_per_sample: int, guard: float = 0.0, drop=()) -> KeyBitstream:
    """Quantize against published edges, also dropping rounds listed in ``drop``."""
    v = np.asarray(values, dtype=float).reshape(-1)
    censored = censored_mask(v, edges, guard)
    if len(drop):
        censored[np.asarray(sorted(drop), dtype=int)] = True
    kept = np.flatnonzero(~censored)

    idx = bin_index(v[kept], edges)
    if kept.size == 0 or np.unique(idx).size < 2:
        raise DegenerateInputError("every uncensored value falls in a single bin")
    return KeyBitstream(
        symbols=_to_bits(gray_code(idx), bits_per_sample),
        kept_rounds=kept,
        censored_rounds=frozenset(int(i) for i in np.flatnonzero(censored)),
        bits_per_sample=bits_per_sample,
        edges=edges,
    )


def quantize(values, bits_per_sample: int = 2, guard: float = 0.0) -> KeyBitstream:
    edges = quantile_edges(values, bits_per_sample)
    return quantize_with_edges(values, edges, bits_per_sample, guard)


def reconcile(a_values, b_values, bits_per_sample: int = 2, guard: float = 0.0) -> tuple[KeyBitstream, KeyBitstream]:
    """Quantize both sides and drop the union of their censored rounds."""
    a = np.asarray(a_values, dtype=float).reshape(-1)
    b = np.asarray(b_values, dtype=float).reshape(-1)
    if a.size != b.size:
        raise DimensionError(f"Alice has {a.size} rounds and Bob {b.size}")
    edges_a = quantile_edges(a, bits_per_sample)
    edges_b = quantile_edges(b, bits_per_sample)
    dropped = set(np.flatnonzero(censored_mask(a, edges_a, guard))) | set(
        np.flatnonzero(censored_mask(b, edges_b, guard))
    )
    key_a = quantize_with_edges(a, edges_a, bits_per_sample, guard, drop=dropped)
    key_b = quantize_with_edges(b, edges_b, bits_per_sample, guard, drop=dropped)
    return key_a, key_b


def key_disagreement_rate(a: KeyBitstream, b: KeyBitstream) -> float:
    """Fraction of differing bits over the rounds both sides kept."""
    if a.bits_per_sample != b.bits_per_sample:
        raise DimensionError(f"bits per sample differ: {a.bits_per_sample} vs {b.bits_per_sample}")
    common, ia, ib = np.intersect1d(a.kept_rounds, b.kept_rounds, return_indices=True)
    if common.size == 0:
        raise DegenerateInputError("the two keys share no uncensored rounds")
    return float(np.mean(a.symbols[ia] != b.symbols[ib]))
