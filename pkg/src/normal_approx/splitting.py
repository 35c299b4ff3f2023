"""Quasi-nilpotent / normal splitting of a commuting family.

The joint generalized kernel H_qn = intersection of the generalized
0-eigenspaces of all members is invariant under the family, every
restriction to it has spectrum {0}, and for families whose gram sum is
near scalar the restrictions to the orthogonal complement H_n are normal.
On finite matrices the decomposition is computed as a *diagnostic*: the
split is always produced, and how well the invariance/normality
conclusions hold is measured and reported, not assumed.
"""

from dataclasses import dataclass

import numpy as np

from .core import MatrixFamily, matrix_to_json
from .errors import InvalidInputError, NormalApproxError
from .spectra import KERNEL_RTOL, eigenvalues, generalized_eigenspace, kernel_basis
from .triangular import simultaneous_schur


def spectral_radius(a) -> float:
    """max |lambda| over the eigenvalues; zero iff (quasi-)nilpotent."""
    return float(np.abs(eigenvalues(a)).max())


def _restriction_radius(c: np.ndarray) -> float:
    """Spectral radius of a restriction, read off a Schur diagonal.

    Equals max |lambda| in exact arithmetic, but stays at rounding level for
    numerically nilpotent restrictions, where direct QR eigenvalues scatter
    at radius about eps^(1/m) and would swamp the quasi-nilpotency
    diagnostic.
    """
    if c.shape[0] == 1:
        return float(abs(c[0, 0]))
    try:
        schur = simultaneous_schur(MatrixFamily((c,)))
    except NormalApproxError:
        return spectral_radius(c)
    return max(abs(z) for z in schur.diag_lambdas[0])


def joint_quasinilpotent_space(family: MatrixFamily, tol: float = KERNEL_RTOL) -> np.ndarray:
    """Orthonormal basis of the intersection of all generalized 0-eigenspaces.

    Each member's generalized kernel is computed by matrix powering; the
    subspace intersection is the kernel of the stacked projector
    complements (I - P_i), SVD-thresholded, which stays robust when the
    individual spaces are nearly degenerate. May be empty (n-by-0).
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    n = family.dim
    bases = []
    for a in family.members:
        basis = generalized_eigenspace(a, 0.0, tol=tol).basis
        if basis.shape[1] == 0:
            return np.zeros((n, 0), dtype=np.complex128)
        bases.append(basis)
    stack = np.vstack([
        np.eye(n, dtype=np.complex128) - b @ b.conj().T for b in bases
    ])
    return kernel_basis(stack, rtol=tol)


@dataclass(frozen=True, eq=False)
class SplitResult:
    """Orthogonal decomposition into quasi-nilpotent and complement subspaces.

    ``qn_basis`` and ``n_basis`` are orthonormal and together span the whole
    space. The defect fields are absolute Frobenius masses: how much each
    member leaks out of H_qn (max over members), how far the two bases are
    from orthogonal, spectral radii of the restrictions to H_qn, and
    normality defects of the restrictions to H_n.
    """

    qn_basis: np.ndarray
    n_basis: np.ndarray
    invariance_defect: float
    orthogonality_defect: float
    qn_spectral_radii: tuple[float, ...]
    normality_defects_on_Hn: tuple[float, ...]

    @property
    def qn_dim(self) -> int:
        return self.qn_basis.shape[1]

    @property
    def n_dim(self) -> int:
        return self.n_basis.shape[1]

    def to_json(self) -> dict:
        return {
            "qn_basis": matrix_to_json(self.qn_basis) if self.qn_dim else
            {"rows": self.qn_basis.shape[0], "cols": 0, "data": []},
            "n_basis": matrix_to_json(self.n_basis) if self.n_dim else
            {"rows": self.n_basis.shape[0], "cols": 0, "data": []},
            "invariance_defect": self.invariance_defect,
            "orthogonality_defect": self.orthogonality_defect,
            "qn_spectral_radii": list(self.qn_spectral_radii),
            "normality_defects_on_Hn": list(self.normality_defects_on_Hn),
        }


def split(family: MatrixFamily, tol: float = KERNEL_RTOL) -> SplitResult:
    """Split the space into the joint generalized kernel and its complement.

    Restriction diagnostics are always computed; when the family is far from
    the scalar-gram-sum regime the normality defects on H_n can be large,
    and the report simply says so.
    """
    qn = joint_quasinilpotent_space(family, tol=tol)
    n = family.dim
    if qn.shape[1] == 0:
        comp = np.eye(n, dtype=np.complex128)
    elif qn.shape[1] == n:
        comp = np.zeros((n, 0), dtype=np.complex128)
    else:
        comp = kernel_basis(qn.conj().T, rtol=tol)

    invariance = 0.0
    radii = []
    defects = []
    proj_qn = qn @ qn.conj().T if qn.shape[1] else np.zeros((n, n), dtype=np.complex128)
    for a in family.members:
        if qn.shape[1]:
            leak = float(np.linalg.norm(a @ qn - proj_qn @ (a @ qn), "fro"))
            invariance = max(invariance, leak)
            radii.append(_restriction_radius(qn.conj().T @ (a @ qn)))
        else:
            radii.append(0.0)
        if comp.shape[1]:
            c = comp.conj().T @ (a @ comp)
            defects.append(float(np.linalg.norm(c @ c.conj().T - c.conj().T @ c, "fro")))
        else:
            defects.append(0.0)
    orth = 0.0
    if qn.shape[1] and comp.shape[1]:
        orth = float(np.linalg.norm(qn.conj().T @ comp, "fro"))
    return SplitResult(
        qn_basis=qn,
        n_basis=comp,
        invariance_defect=invariance,
        orthogonality_defect=orth,
        qn_spectral_radii=tuple(radii),
        normality_defects_on_Hn=tuple(defects),
    )
