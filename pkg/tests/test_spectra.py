import numpy as np
import pytest

from normal_approx import (
    InvalidInputError,
    cluster_eigenvalues,
    eigenvalues,
    generalized_eigenspace,
    hermitian_eigen,
    hs_norm,
    kernel_basis,
    numerical_spread,
    spectral_diameter,
)

from conftest import block_diag, jordan_block, random_complex, random_unitary


class TestEigenvalues:
    def test_diagonal(self):
        w = eigenvalues(np.diag([3.0, 1 + 2j]))
        assert np.allclose(w, [1 + 2j, 3.0])

    def test_jordan_block(self):
        w = eigenvalues(jordan_block(2))
        assert np.allclose(w, [0, 0], atol=1e-12)

    def test_companion_of_z2_minus_1(self):
        companion = np.array([[0, 1], [1, 0]], dtype=complex)
        assert np.allclose(eigenvalues(companion), [-1, 1], atol=1e-14)

    def test_lexicographic_order(self, rng):
        w = eigenvalues(random_complex(8, rng))
        keys = [(z.real, z.imag) for z in w]
        assert keys == sorted(keys)


class TestHermitianEigen:
    def test_diag_01(self):
        w, v = hermitian_eigen(np.diag([0.0, 1.0]))
        assert np.allclose(w, [0, 1])
        assert np.allclose(np.abs(v), np.eye(2))

    def test_pauli_x(self):
        w, _ = hermitian_eigen(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(w, [-1, 1], atol=1e-14)

    def test_zero(self):
        w, _ = hermitian_eigen(np.zeros((3, 3)))
        assert np.allclose(w, 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInputError):
            hermitian_eigen(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_residuals_and_orthonormality(self, rng):
        a = random_complex(9, rng)
        h = (a + a.conj().T) / 2
        w, v = hermitian_eigen(h)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(v.conj().T @ v - np.eye(9)) <= 1e-12 * 9
        for j in range(9):
            assert np.linalg.norm(h @ v[:, j] - w[j] * v[:, j]) <= 1e-10 * hs_norm(h)


class TestClusterEigenvalues:
    def test_merges_close_values(self):
        vals = [1.0, 1.0 + 5e-9, 2.0, 2.0 + 3e-9, 5.0]
        clusters = cluster_eigenvalues(vals, delta=1e-8)
        assert [len(idx) for _, idx in clusters] == [2, 2, 1]
        assert clusters[0][0] == pytest.approx(1.0 + 2.5e-9)

    def test_sorted_by_representative(self, rng):
        vals = random_complex(6, rng)[0]
        clusters = cluster_eigenvalues(vals, delta=1e-12)
        keys = [(rep.real, rep.imag) for rep, _ in clusters]
        assert keys == sorted(keys)


class TestKernelBasis:
    def test_exact_kernel(self):
        b = kernel_basis(np.diag([0.0, 2.0, 0.0]))
        assert b.shape == (3, 2)
        assert np.linalg.norm(np.diag([0.0, 2.0, 0.0]) @ b) <= 1e-14

    def test_full_rank_has_empty_kernel(self, rng):
        b = kernel_basis(np.eye(4) + 0.1 * random_complex(4, rng))
        assert b.shape[1] == 0

    def test_orthonormal_and_phase_fixed(self, rng):
        m = random_complex(6, rng, 3) @ random_complex(3, rng, 6)
        b = kernel_basis(m)
        assert b.shape[1] == 3
        assert np.linalg.norm(b.conj().T @ b - np.eye(3)) <= 1e-12
        for j in range(b.shape[1]):
            piv = b[np.argmax(np.abs(b[:, j])), j]
            assert abs(piv.imag) <= 1e-12 and piv.real > 0


class TestGeneralizedEigenspace:
    def test_full_jordan_block(self):
        out = generalized_eigenspace(jordan_block(3), 0.0)
        assert out.dim == 3 and out.order == 3

    def test_simple_eigenvalue(self):
        out = generalized_eigenspace(np.diag([1.0, 2.0]), 1.0)
        assert out.dim == 1 and out.order == 1
        assert np.allclose(np.abs(out.basis[:, 0]), [1, 0])

    def test_jordan_plus_scalar(self):
        a = block_diag(jordan_block(2), np.array([[5.0 + 0j]]))
        out = generalized_eigenspace(a, 0.0)
        assert out.dim == 2 and out.order == 2
        assert np.linalg.norm(out.basis[2, :]) <= 1e-10

    def test_not_an_eigenvalue(self, rng):
        out = generalized_eigenspace(np.eye(3), 7.0)
        assert out.dim == 0

    def test_rejects_bad_tolerance(self):
        with pytest.raises(InvalidInputError):
            generalized_eigenspace(np.eye(2), 0.0, tol=0.0)

    def test_scalar_matrix(self):
        out = generalized_eigenspace(2.0 * np.eye(3), 2.0)
        assert out.dim == 3 and out.order == 1

    def test_residual_invariant(self, rng):
        a = block_diag(jordan_block(3, 0.0), np.diag([2.0 + 0j, 5.0]))
        u = random_unitary(5, rng)
        a = u @ a @ u.conj().T
        out = generalized_eigenspace(a, 0.0)
        assert out.dim == 3
        power = np.linalg.matrix_power(-a, out.order)
        norm_a = np.linalg.norm(a)
        assert np.linalg.norm(power @ out.basis) <= 1e-9 * max(1.0, norm_a) ** out.order
        assert np.linalg.norm(out.basis.conj().T @ out.basis - np.eye(3)) <= 1e-10

    def test_dimension_matches_multiplicity_when_separated(self, rng):
        u = random_unitary(5, rng)
        a = u @ np.diag([2.0, 2.0, 7.0, 9.0, 11.0 + 0j]) @ u.conj().T
        out = generalized_eigenspace(a, 2.0)
        assert out.dim == 2


class TestNumericalSpread:
    def test_scalar_matrix_zero(self):
        out = numerical_spread((1.5 - 2j) * np.eye(4))
        assert out.spread <= 1e-12

    def test_normal_diag_01(self):
        out = numerical_spread(np.diag([0.0, 1.0]))
        assert out.spread == pytest.approx(1.0, abs=1e-12)

    def test_nilpotent_disk(self):
        # numerical range of [[0,1],[0,0]] is the closed disk of radius 1/2
        out = numerical_spread(np.array([[0, 1], [0, 0]], dtype=complex))
        assert out.spread == pytest.approx(1.0, abs=1e-10)

    def test_grid_too_small(self):
        with pytest.raises(InvalidInputError):
            numerical_spread(np.eye(2), grid=8)

    def test_negative_refine_iters(self):
        with pytest.raises(InvalidInputError):
            numerical_spread(np.eye(2), refine_iters=-1)

    def test_hermitian_equals_eigen_range(self, rng):
        for n in (2, 6, 12):
            a = random_complex(n, rng)
            h = (a + a.conj().T) / 2
            w = np.linalg.eigvalsh(h)
            out = numerical_spread(h)
            assert out.spread == pytest.approx(w[-1] - w[0], rel=1e-9)

    def test_unitary_invariance(self, rng):
        a = random_complex(7, rng)
        u = random_unitary(7, rng)
        s1 = numerical_spread(a).spread
        s2 = numerical_spread(u.conj().T @ a @ u).spread
        assert abs(s1 - s2) <= 1e-8 * (1 + hs_norm(a))

    def test_normal_matches_spectral_diameter(self, rng):
        for n in (3, 8, 16):
            u = random_unitary(n, rng)
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            a = u @ np.diag(d) @ u.conj().T
            out = numerical_spread(a)
            assert abs(out.spread - spectral_diameter(a)) <= 1e-6 * (1 + hs_norm(a))

    def test_sampling_lower_bound(self, rng):
        a = random_complex(6, rng)
        out = numerical_spread(a)
        xs = rng.standard_normal((6, 10_000)) + 1j * rng.standard_normal((6, 10_000))
        xs /= np.linalg.norm(xs, axis=0)
        rq = np.sum(xs.conj() * (a @ xs), axis=0)
        pair_max = float(np.abs(rq[:5000, None] - rq[None, 5000:]).max())
        assert pair_max <= out.spread + 1e-9 * (1 + hs_norm(a))

    def test_grid_monotonicity(self, rng):
        for _ in range(5):
            a = random_complex(5, rng)
            s_small = numerical_spread(a, grid=64).spread
            s_big = numerical_spread(a, grid=128).spread
            assert s_big >= s_small - 1e-12

    def test_witnesses_re_evaluate(self, rng):
        a = random_complex(8, rng)
        out = numerical_spread(a)
        for z, v in zip(out.witness_pair, out.witness_vectors):
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
            assert complex(np.vdot(v, a @ v)) == pytest.approx(z, abs=1e-12)
        w0, w1 = out.witness_pair
        assert abs(w0 - w1) <= out.spread + 1e-9 * (1 + out.spread)

    def test_serialization_contract(self):
        out = numerical_spread(np.diag([0.0, 1.0]))
        obj = out.to_json()
        assert set(obj) == {"spread", "theta_star", "witnesses", "grid_points"}
        assert obj["grid_points"] == 1024
        assert len(obj["witnesses"]) == 2 and len(obj["witnesses"][0]) == 2


class TestSpectralDiameter:
    def test_identity(self):
        assert spectral_diameter(np.eye(5)) == 0.0

    def test_two_points(self):
        assert spectral_diameter(np.diag([1.0, 1j])) == pytest.approx(np.sqrt(2), abs=1e-14)

    def test_nilpotent(self):
        assert spectral_diameter(jordan_block(4)) <= 1e-12
