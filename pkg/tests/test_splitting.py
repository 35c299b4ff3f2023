import numpy as np
import pytest

from normal_approx import (
    InvalidInputError,
    MatrixFamily,
    hs_norm,
    joint_quasinilpotent_space,
    spectral_radius,
    split,
    truncated_shift,
)
from normal_approx.generators import gen_nilpotent_plus_normal

from conftest import block_diag, jordan_block, random_unitary


def _coordinate_support(basis, coords, tol=1e-9):
    """True if span(basis) equals the span of the given coordinate axes."""
    mask = np.zeros(basis.shape[0], dtype=bool)
    mask[list(coords)] = True
    return np.linalg.norm(basis[~mask, :]) <= tol and basis.shape[1] == len(coords)


class TestSpectralRadius:
    def test_nilpotent(self):
        assert spectral_radius(jordan_block(4)) <= 1e-12

    def test_diagonal(self):
        assert spectral_radius(np.diag([3.0, -4j])) == pytest.approx(4.0, abs=1e-14)

    def test_off_diagonal(self):
        a = np.array([[0.0, 2.0], [0.5, 0.0]], dtype=complex)
        assert spectral_radius(a) == pytest.approx(1.0, abs=1e-12)


class TestJointQuasinilpotentSpace:
    def test_jordan_plus_invertible_diag(self):
        a = block_diag(jordan_block(3), np.diag([1.0 + 0j, 2.0]))
        basis = joint_quasinilpotent_space(MatrixFamily((a,)))
        assert _coordinate_support(basis, (0, 1, 2))

    def test_invertible_family_trivial(self, rng):
        u = random_unitary(4, rng)
        fam = MatrixFamily((u @ np.diag([1.0, 2, 3, 4 + 0j]) @ u.conj().T,))
        assert joint_quasinilpotent_space(fam).shape == (4, 0)

    def test_pair_with_shared_block(self):
        j2 = jordan_block(2)
        one = np.array([[1.0 + 0j]])
        fam = MatrixFamily((block_diag(j2, one), block_diag(j2 @ j2, one)))
        basis = joint_quasinilpotent_space(fam)
        assert _coordinate_support(basis, (0, 1))

    def test_bad_tolerance(self):
        with pytest.raises(InvalidInputError):
            joint_quasinilpotent_space(MatrixFamily((np.eye(2),)), tol=0.0)


class TestSplit:
    def test_planted_block_model_exact_recovery(self):
        fam = gen_nilpotent_plus_normal(3, 2, 2, seed=12)
        result = split(fam)
        scale = 1 + max(hs_norm(a) for a in fam)
        assert (result.qn_dim, result.n_dim) == (3, 2)
        assert result.invariance_defect <= 1e-10 * scale
        assert result.orthogonality_defect <= 1e-10
        assert max(result.normality_defects_on_Hn) <= 1e-10 * scale
        assert max(result.qn_spectral_radii) <= 1e-8 * scale

    def test_commuting_normals_split_at_joint_kernel(self, rng):
        u = random_unitary(4, rng)
        d1 = np.diag([0.0, 1.0, 2.0, 3.0 + 0j])
        d2 = np.diag([0.0, 5.0, 6.0, 7.0 + 0j])
        fam = MatrixFamily((u @ d1 @ u.conj().T, u @ d2 @ u.conj().T))
        result = split(fam)
        assert (result.qn_dim, result.n_dim) == (1, 3)
        scale = 1 + max(hs_norm(a) for a in fam)
        assert max(result.normality_defects_on_Hn) <= 1e-10 * scale
        # the recovered H_qn is the joint 0-eigenspace U e1
        overlap = np.abs(np.vdot(u[:, 0], result.qn_basis[:, 0]))
        assert overlap == pytest.approx(1.0, abs=1e-10)

    def test_truncated_shift_degenerates_to_full_qn(self):
        fam = MatrixFamily((truncated_shift(6),))
        result = split(fam)
        assert (result.qn_dim, result.n_dim) == (6, 0)
        assert result.normality_defects_on_Hn == (0.0,)
        assert max(result.qn_spectral_radii) <= 1e-10

    def test_dims_always_sum(self):
        for seed, (nq, nn) in enumerate([(0, 4), (4, 0), (2, 3), (5, 1)]):
            fam = gen_nilpotent_plus_normal(nq, nn, 2, seed=seed)
            result = split(fam)
            assert result.qn_dim + result.n_dim == nq + nn
            assert (result.qn_dim, result.n_dim) == (nq, nn)

    def test_invariance_under_commutation(self):
        fam = gen_nilpotent_plus_normal(4, 3, 3, seed=44)
        result = split(fam)
        scale = 1 + max(hs_norm(a) for a in fam)
        assert result.invariance_defect <= 1e-8 * scale

    def test_bases_orthonormal(self):
        fam = gen_nilpotent_plus_normal(3, 3, 2, seed=77)
        result = split(fam)
        for b in (result.qn_basis, result.n_basis):
            if b.shape[1]:
                assert np.linalg.norm(b.conj().T @ b - np.eye(b.shape[1])) <= 1e-10

    def test_serialization(self):
        fam = gen_nilpotent_plus_normal(2, 2, 2, seed=5)
        obj = split(fam).to_json()
        assert set(obj) == {
            "qn_basis", "n_basis", "invariance_defect", "orthogonality_defect",
            "qn_spectral_radii", "normality_defects_on_Hn",
        }
        assert obj["qn_basis"]["cols"] == 2
