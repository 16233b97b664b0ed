"""Complex dense linear algebra: Kronecker product, vectorization, compact SVD,
pseudoinverse and rank.

Matrices are ``numpy.ndarray`` of dtype ``complex128``. Column vectors are
``(n, 1)`` arrays.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from irs_skg.errors import DimensionError, SvdConvergenceError

DEFAULT_RANK_TOL = 1e-12

# LAPACK drivers tried in order; gesvd is slower but converges where gesdd fails.
_SVD_DRIVERS = ("gesdd", "gesvd")


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce input to a finite 2-D complex array with at least one row and column."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


@dataclass(frozen=True, eq=False)
class CompactSvd:
    """Compact SVD ``A = U diag(xi) V^H`` restricted to the numerical rank."""

    left: np.ndarray  # U, n x r
    singular_values: np.ndarray  # xi, descending, all above threshold
    right: np.ndarray  # V, m x r

    @property
    def rank(self) -> int:
        return len(self.singular_values)

    @property
    def xi1(self) -> float:
        """Largest singular value (0 for a rank-zero input)."""
        return float(self.singular_values[0]) if self.rank else 0.0

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular_values) @ self.right.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def vec(a) -> np.ndarray:
    """Stack the columns of ``a`` into one column vector (column-major)."""
    m = as_matrix(a)
    return m.reshape(-1, 1, order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    flat = np.asarray(v, dtype=np.complex128).reshape(-1)
    if flat.size != rows * cols:
        raise DimensionError(f"cannot reshape vector of length {flat.size} into {rows}x{cols}")
    return flat.reshape(rows, cols, order="F")


def _raw_svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    attempts = 0
    for driver in _SVD_DRIVERS:
        attempts += 1
        try:
            return scipy.linalg.svd(m, full_matrices=False, lapack_driver=driver, check_finite=False)
        except np.linalg.LinAlgError:
            continue
    raise SvdConvergenceError(
        f"SVD of {m.shape[0]}x{m.shape[1]} matrix did not converge after {attempts} driver attempts",
        attempts=attempts,
    )


def compact_svd(a, tol: float = DEFAULT_RANK_TOL) -> CompactSvd:
    """Compact SVD keeping singular values ``>= tol * max(xi)``.

    The phase of each singular pair is fixed by making the largest-magnitude
    entry of the right singular vector real and positive.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    m = as_matrix(a)
    u, s, vh = _raw_svd(m)

    if s.size == 0 or s[0] == 0.0:
        return CompactSvd(
            left=np.zeros((m.shape[0], 0), dtype=np.complex128),
            singular_values=np.zeros(0),
            right=np.zeros((m.shape[1], 0), dtype=np.complex128),
        )

    keep = s >= tol * s[0]
    u = u[:, keep]
    s = s[keep]
    v = vh[keep, :].conj().T

    pivots = np.argmax(np.abs(v), axis=0)
    pivot_entries = v[pivots, np.arange(v.shape[1])]
    phase = np.conj(pivot_entries) / np.abs(pivot_entries)
    v = v * phase
    u = u * phase

    return CompactSvd(left=u, singular_values=s, right=v)


def singular_values(a) -> np.ndarray:
    """All singular values of ``a``, descending."""
    m = as_matrix(a)
    try:
        return scipy.linalg.svdvals(m, check_finite=False)
    except np.linalg.LinAlgError:
        return _raw_svd(m)[1]


def pinv(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``V diag(1/xi) U^H`` over the retained singular values."""
    m = as_matrix(a)
    svd = compact_svd(m, tol)
    if svd.rank == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    return (svd.right / svd.singular_values) @ svd.left.conj().T


def rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank: count of singular values ``>= tol * max(xi)``."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s >= tol * s[0]))


def largest_singular(a) -> float:
    """Largest singular value; 0 for the zero matrix."""
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0
