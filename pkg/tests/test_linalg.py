"""Tests for the dense linear-algebra substrate."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebcompose import linalg
from ebcompose.errors import DimMismatch, NotHermitian


class TestEigHermitian:
    def test_identity(self):
        w, _ = linalg.eig_hermitian(np.eye(2))
        np.testing.assert_allclose(w, [1.0, 1.0])

    def test_pauli_z(self):
        w, _ = linalg.eig_hermitian(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(w, [-1.0, 1.0])

    def test_max_entangled_projector_d2(self):
        # 4x4 characteristic polynomial by hand: rank one, trace 2.
        w, _ = linalg.eig_hermitian(linalg.max_entangled_projector(2))
        np.testing.assert_allclose(w, [0.0, 0.0, 0.0, 2.0], atol=1e-12)

    def test_eigenvalues_ascending(self, rng):
        w, _ = linalg.eig_hermitian(linalg.random_hermitian(7, rng))
        assert np.all(np.diff(w) >= 0)

    @pytest.mark.parametrize("d", [2, 9, 81])
    def test_reconstruction(self, d, rng):
        M = linalg.random_hermitian(d, rng)
        w, V = linalg.eig_hermitian(M)
        resid = np.max(np.abs(M - (V * w) @ V.conj().T))
        assert resid <= 1e-10 * np.max(np.abs(np.linalg.eigvalsh(M)))
        np.testing.assert_allclose(V.conj().T @ V, np.eye(d), atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            linalg.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMinEig:
    def test_zero_matrix(self):
        assert linalg.min_eig(np.zeros((3, 3))) == 0.0

    def test_diagonal(self):
        assert linalg.min_eig(np.diag([3.0, -2.0])) == pytest.approx(-2.0)

    def test_identity_minus_i_sigma(self):
        # eigenvalues of i*[[0,1],[-1,0]] are -1 and 1
        sigma = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert linalg.min_eig(np.eye(2) - 1j * sigma) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            linalg.min_eig(np.array([[0.0, 1.0], [0.5, 0.0]]))


class TestPsd:
    def test_psd_accepts_small_negative_noise(self):
        assert linalg.is_psd(np.diag([1.0, -1e-12]))

    def test_psd_rejects_clear_negative(self):
        assert not linalg.is_psd(np.diag([1.0, -1e-3]))

    def test_margin_sign(self):
        assert linalg.psd_margin(np.eye(3)) > 0
        assert linalg.psd_margin(np.diag([5.0, -1.0])) < 0


class TestKron:
    def test_identities(self):
        np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_single_entry(self):
        e00 = np.diag([1.0, 0.0])
        e11 = np.diag([0.0, 1.0])
        out = linalg.kron(e00, e11)
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0
        np.testing.assert_array_equal(out, expected)

    def test_max_entangled_vector_matches_kron_sum(self):
        d = 3
        direct = sum(
            np.kron(np.eye(d)[:, [i]], np.eye(d)[:, [i]]) for i in range(d)
        ).ravel()
        np.testing.assert_array_equal(linalg.max_entangled_vector(d), direct)


class TestPartialTranspose:
    def test_product(self, rng):
        A = linalg.random_hermitian(2, rng)
        B = linalg.random_hermitian(3, rng)
        out = linalg.partial_transpose(np.kron(A, B), (2, 3), "A")
        np.testing.assert_allclose(out, np.kron(A.T, B), atol=1e-14)
        out = linalg.partial_transpose(np.kron(A, B), (2, 3), "B")
        np.testing.assert_allclose(out, np.kron(A, B.T), atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("which", ["A", "B"])
    def test_max_entangled_gives_flip(self, d, which):
        out = linalg.partial_transpose(linalg.max_entangled_projector(d), (d, d), which)
        np.testing.assert_array_equal(out, linalg.flip_operator(d))

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["A", "B"]))
    @settings(max_examples=25, deadline=None)
    def test_involution_exact(self, seed, which):
        gen = np.random.default_rng(seed)
        M = gen.normal(size=(6, 6)) + 1j * gen.normal(size=(6, 6))
        twice = linalg.partial_transpose(
            linalg.partial_transpose(M, (2, 3), which), (2, 3), which
        )
        assert np.array_equal(twice, M)

    def test_preserves_hermiticity_and_trace(self, rng):
        M = linalg.random_hermitian(6, rng)
        out = linalg.partial_transpose(M, (3, 2), "B")
        assert linalg.hermiticity_defect(out) == 0.0
        assert np.trace(out) == pytest.approx(np.trace(M).real)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            linalg.partial_transpose(np.eye(6), (4, 2), "A")


class TestPartialTrace:
    def test_product(self, rng):
        A = linalg.random_hermitian(3, rng)
        B = linalg.random_hermitian(2, rng)
        out = linalg.partial_trace(np.kron(A, B), (3, 2), "B")
        np.testing.assert_allclose(out, np.trace(B) * A, atol=1e-14)
        out = linalg.partial_trace(np.kron(A, B), (3, 2), "A")
        np.testing.assert_allclose(out, np.trace(A) * B, atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("which", ["A", "B"])
    def test_max_entangled_marginals(self, d, which):
        out = linalg.partial_trace(linalg.max_entangled_projector(d), (d, d), which)
        np.testing.assert_array_equal(out, np.eye(d))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_trace_preservation(self, seed):
        gen = np.random.default_rng(seed)
        M = gen.normal(size=(6, 6)) + 1j * gen.normal(size=(6, 6))
        nuc = np.linalg.norm(M, "nuc")
        for which in ("A", "B"):
            out = linalg.partial_trace(M, (2, 3), which)
            assert abs(np.trace(out) - np.trace(M)) <= 1e-12 * max(1.0, nuc)


class TestRealign:
    def test_product_is_rank_one(self, rng):
        for _ in range(100):
            A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            R = linalg.realign(np.kron(A, B), (2, 3))
            np.testing.assert_allclose(
                R, np.outer(A.ravel(), B.ravel()), atol=1e-13
            )
            s = np.linalg.svd(R, compute_uv=False)
            assert s[1] <= 1e-10 * s[0]

    @pytest.mark.parametrize("d", [2, 3])
    def test_max_entangled_singular_values(self, d):
        R = linalg.realign(linalg.max_entangled_projector(d), (d, d))
        np.testing.assert_array_equal(R, np.eye(d * d))
        s = np.linalg.svd(R, compute_uv=False)
        np.testing.assert_allclose(s, np.ones(d * d))

    def test_rank_counts_product_terms(self, rng):
        # two orthogonal product terms realign to a rank-2 matrix
        M = np.kron(np.diag([1.0, 0.0]), np.eye(2)) + np.kron(
            np.diag([0.0, 1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])
        )
        s = np.linalg.svd(linalg.realign(M, (2, 2)), compute_uv=False)
        assert np.sum(s > 1e-8 * s[0]) == 2


class TestPermuteSystems:
    def test_swap_two_factors(self, rng):
        A = linalg.random_hermitian(2, rng)
        B = linalg.random_hermitian(3, rng)
        out = linalg.permute_systems(np.kron(A, B), [2, 3], [1, 0])
        np.testing.assert_allclose(out, np.kron(B, A), atol=1e-14)

    def test_three_factors(self, rng):
        mats = [linalg.random_hermitian(d, rng) for d in (2, 3, 2)]
        M = np.kron(np.kron(mats[0], mats[1]), mats[2])
        out = linalg.permute_systems(M, [2, 3, 2], [2, 0, 1])
        np.testing.assert_allclose(
            out, np.kron(np.kron(mats[2], mats[0]), mats[1]), atol=1e-13
        )

    def test_identity_permutation(self, rng):
        M = linalg.random_hermitian(6, rng)
        np.testing.assert_array_equal(linalg.permute_systems(M, [2, 3], [0, 1]), M)


class TestJson:
    def test_round_trip_bit_exact(self, rng):
        M = linalg.random_hermitian(4, rng)
        again = linalg.matrix_from_json(linalg.matrix_to_json(M))
        assert np.array_equal(M, again)

    def test_decimal_strings(self):
        obj = {"rows": 2, "cols": 2, "re": [["2.4", "-5.3"], ["-5.3", "26.7"]]}
        M = linalg.matrix_from_json(obj)
        np.testing.assert_array_equal(M, np.array([[2.4, -5.3], [-5.3, 26.7]]))
        assert M.dtype == complex

    def test_shape_mismatch(self):
        with pytest.raises(DimMismatch):
            linalg.matrix_from_json({"rows": 2, "cols": 2, "re": [[1.0]]})


class TestRandomHelpers:
    def test_haar_unitary_is_unitary(self, rng):
        U = linalg.haar_unitary(5, rng)
        np.testing.assert_allclose(U @ U.conj().T, np.eye(5), atol=1e-12)

    def test_random_psd_is_psd(self, rng):
        assert linalg.is_psd(linalg.random_psd(6, rng))

    def test_rank_limited_psd(self, rng):
        w = np.linalg.eigvalsh(linalg.random_psd(5, rng, rank=2))
        assert np.sum(w > 1e-10) == 2
