"""Tests for complex linear algebra helpers."""

import numpy as np
import pytest
import scipy.linalg

from irs_skg import linalg
from irs_skg.errors import DimensionError, SvdConvergenceError
from tests.helpers import haar_unitary, random_complex


class TestVec:
    def test_column_major(self):
        a = np.array([[1, 2], [3, 4]])
        assert linalg.vec(a).reshape(-1).tolist() == [1, 3, 2, 4]
        assert linalg.vec(a).shape == (4, 1)

    def test_unvec_inverts_vec(self, gen):
        a = random_complex(gen, 3, 5)
        np.testing.assert_array_equal(linalg.unvec(linalg.vec(a), 3, 5), a)

    def test_unvec_wrong_length(self):
        with pytest.raises(DimensionError):
            linalg.unvec(np.zeros(5), 2, 3)

    def test_kron_vec_identity(self, gen):
        """vec(A X B) = (B^T kron A) vec(X)."""
        a = random_complex(gen, 3, 4)
        x = random_complex(gen, 4, 2)
        b = random_complex(gen, 2, 5)
        lhs = linalg.vec(a @ x @ b)
        rhs = linalg.kron(b.T, a) @ linalg.vec(x)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_kron_blocks(self):
        a = np.array([[1, 2]])
        b = np.eye(2)
        np.testing.assert_array_equal(linalg.kron(a, b), np.hstack([np.eye(2), 2 * np.eye(2)]))


class TestAsMatrix:
    def test_vector_becomes_column(self):
        assert linalg.as_matrix([1, 2, 3]).shape == (3, 1)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            linalg.as_matrix([[1.0, np.nan]])

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            linalg.as_matrix(np.zeros((0, 3)))

    def test_rejects_3d(self):
        with pytest.raises(DimensionError):
            linalg.as_matrix(np.zeros((2, 2, 2)))


class TestCompactSvd:
    def test_reconstructs(self, gen):
        a = random_complex(gen, 5, 3)
        svd = linalg.compact_svd(a)
        assert svd.rank == 3
        np.testing.assert_allclose(svd.reconstruct(), a, atol=1e-12)
        np.testing.assert_allclose(svd.left.conj().T @ svd.left, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(svd.right.conj().T @ svd.right, np.eye(3), atol=1e-12)

    def test_descending(self, gen):
        s = linalg.compact_svd(random_complex(gen, 6, 6)).singular_values
        assert np.all(np.diff(s) <= 0)

    def test_rank_deficient(self, gen):
        a = random_complex(gen, 6, 2) @ random_complex(gen, 2, 5)
        svd = linalg.compact_svd(a)
        assert svd.rank == 2
        assert svd.left.shape == (6, 2)
        assert svd.right.shape == (5, 2)
        np.testing.assert_allclose(svd.reconstruct(), a, atol=1e-10)

    def test_zero_matrix(self):
        svd = linalg.compact_svd(np.zeros((3, 4)))
        assert svd.rank == 0
        assert svd.xi1 == 0.0
        assert svd.left.shape == (3, 0)
        assert svd.right.shape == (4, 0)

    def test_phase_convention(self, gen):
        svd = linalg.compact_svd(random_complex(gen, 4, 4))
        for j in range(svd.rank):
            v = svd.right[:, j]
            pivot = v[np.argmax(np.abs(v))]
            assert abs(pivot.imag) < 1e-12
            assert pivot.real > 0

    def test_deterministic(self, gen):
        a = random_complex(gen, 4, 3)
        first = linalg.compact_svd(a)
        second = linalg.compact_svd(a.copy())
        np.testing.assert_array_equal(first.right, second.right)
        np.testing.assert_array_equal(first.left, second.left)

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            linalg.compact_svd(np.eye(2), tol=0)

    def test_falls_back_then_gives_up(self, monkeypatch):
        drivers = []

        def failing_svd(m, full_matrices, lapack_driver, check_finite):
            drivers.append(lapack_driver)
            raise np.linalg.LinAlgError("no convergence")

        monkeypatch.setattr(scipy.linalg, "svd", failing_svd)
        with pytest.raises(SvdConvergenceError) as info:
            linalg.compact_svd(np.eye(3))
        assert drivers == ["gesdd", "gesvd"]
        assert info.value.attempts == 2

    def test_falls_back_to_second_driver(self, monkeypatch):
        original = scipy.linalg.svd

        def flaky_svd(m, full_matrices, lapack_driver, check_finite):
            if lapack_driver == "gesdd":
                raise np.linalg.LinAlgError("no convergence")
            return original(m, full_matrices=full_matrices, lapack_driver=lapack_driver, check_finite=check_finite)

        monkeypatch.setattr(scipy.linalg, "svd", flaky_svd)
        assert linalg.compact_svd(2 * np.eye(3)).xi1 == pytest.approx(2.0)


class TestUnitaryInvariance:
    def test_left_unitary_keeps_singular_values(self, gen):
        for _ in range(1000):
            n = int(gen.integers(1, 9))
            m = int(gen.integers(1, 9))
            q = random_complex(gen, n, m)
            s_q = linalg.singular_values(q)
            s_gq = linalg.singular_values(haar_unitary(gen, n) @ q)
            np.testing.assert_allclose(s_gq, s_q, rtol=1e-9, atol=1e-12 * s_q[0])

    def test_channel_reduces_to_dominant_basis(self, gen):
        """sigma(H X) equals sigma(Xi V^H X)."""
        for _ in range(200):
            n = int(gen.integers(2, 9))
            h = random_complex(gen, n, n)
            x = random_complex(gen, n, 12)
            svd = linalg.compact_svd(h)
            reduced = (svd.singular_values[:, None] * svd.right.conj().T) @ x
            np.testing.assert_allclose(
                linalg.singular_values(h @ x), linalg.singular_values(reduced), rtol=1e-9
            )


class TestPinvAndRank:
    def test_penrose_conditions(self, gen):
        a = random_complex(gen, 5, 2) @ random_complex(gen, 2, 4)
        p = linalg.pinv(a)
        np.testing.assert_allclose(a @ p @ a, a, atol=1e-10)
        np.testing.assert_allclose(p @ a @ p, p, atol=1e-10)
        np.testing.assert_allclose((a @ p).conj().T, a @ p, atol=1e-10)

    def test_matches_numpy(self, gen):
        a = random_complex(gen, 6, 3)
        np.testing.assert_allclose(linalg.pinv(a), np.linalg.pinv(a), atol=1e-12)

    def test_zero_matrix(self):
        p = linalg.pinv(np.zeros((2, 3)))
        assert p.shape == (3, 2)
        assert not np.any(p)

    def test_rank(self, gen):
        assert linalg.rank(np.eye(4)) == 4
        assert linalg.rank(np.zeros((3, 3))) == 0
        assert linalg.rank(random_complex(gen, 5, 1) @ random_complex(gen, 1, 5)) == 1

    def test_largest_singular(self):
        assert linalg.largest_singular(np.diag([1.0, 3.0, 2.0])) == pytest.approx(3.0)
        assert linalg.largest_singular(np.zeros((2, 2))) == 0.0
