"""Joint eigenvectors and simultaneous unitary triangularization.

A commuting family admits a common unit eigenvector; deflating it and
recursing on the trailing blocks produces one unitary U that conjugates
every member to upper-triangular form. The common eigenvector is found by
recursive eigenspace refinement:

  * the leading member's spectrum is clustered and one cluster chosen,
  * the remaining members are compressed to that eigenspace (they preserve
    it because the family commutes),
  * recurse until the space is one-dimensional or the members run out.

Cluster choice is deterministic. A numerically certified kernel (smallest
singular value below the rank threshold) takes priority as the eigenvalue-0
cluster with the SVD kernel as its eigenspace; otherwise the cluster whose
representative is smallest in (Re, Im) lexicographic order is used. The
kernel-priority rule is what keeps diagonals of nilpotent inputs at zero:
computed eigenvalues of a drifted m-by-m nilpotent block scatter at radius
about eps^(1/m), far outside any honest cluster tolerance, while its kernel
stays numerically exact.
"""

from dataclasses import dataclass

import numpy as np

from .core import MatrixFamily, as_matrix, matrix_to_json, require_square
from .errors import InvalidInputError, JointEigenvectorError, SubspaceError
from .spectra import (
    CLUSTER_DELTA_FACTOR,
    KERNEL_RTOL,
    cluster_eigenvalues,
    eigenvalues,
    fix_column_phases,
    generalized_eigenspace,
    kernel_basis,
)

DEFAULT_SCHUR_TOL = 1e-8

# members within this fraction of the residual tolerance of a scalar matrix
# impose no constraint on the joint eigenvector and are skipped
_SCALAR_FRACTION = 0.01


def restrict_to_subspace(a, basis, tol: float = DEFAULT_SCHUR_TOL) -> np.ndarray:
    """Compression basis* A basis, after checking the subspace is invariant.

    Raises :class:`SubspaceError` when ||A B - B (B* A B)||_F exceeds
    tol * ||A||_F, i.e. when A visibly leaks out of span(basis).
    """
    a = require_square(as_matrix(a))
    basis = as_matrix(basis)
    if basis.shape[0] != a.shape[0]:
        raise InvalidInputError(
            f"basis rows {basis.shape[0]} do not match matrix dimension {a.shape[0]}"
        )
    compressed = basis.conj().T @ (a @ basis)
    leak = float(np.linalg.norm(a @ basis - basis @ compressed, "fro"))
    if leak > tol * max(float(np.linalg.norm(a, "fro")), np.finfo(float).tiny):
        raise SubspaceError(
            f"subspace is not invariant: leakage {leak:.3e} exceeds tolerance"
        )
    return compressed


def _compress(a: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis.conj().T @ (a @ basis)


def _rayleigh_residuals(mats, v: np.ndarray) -> tuple[float, ...]:
    out = []
    for a in mats:
        av = a @ v
        out.append(float(np.linalg.norm(av - np.vdot(v, av) * v)))
    return tuple(out)


def _ritz_vector(m: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Minimal-residual Ritz vector of ``m`` within span(basis)."""
    compressed = _compress(m, basis)
    w, u = np.linalg.eig(compressed)
    best = None
    for j in range(w.shape[0]):
        cand = basis @ u[:, j]
        nrm = np.linalg.norm(cand)
        if nrm == 0.0:
            continue
        cand = cand / nrm
        res = float(np.linalg.norm(m @ cand - w[j] * cand))
        key = (res, w[j].real, w[j].imag, j)
        if best is None or key < best[0]:
            best = (key, cand)
    if best is None:
        return basis[:, 0]
    return best[1]


def _choose_eigenspace(m: np.ndarray, tol: float) -> tuple[np.ndarray, bool]:
    """Eigenspace of the deterministically chosen eigenvalue cluster of ``m``.

    Returns (orthonormal basis, terminal) where ``terminal`` marks the
    generalized-eigenspace fallback: its basis spans a Jordan-type subspace
    rather than genuine eigenvectors, so the caller must take a Ritz vector
    instead of recursing.
    """
    dim = m.shape[0]
    norm_m = float(np.linalg.norm(m, "fro"))
    delta = CLUSTER_DELTA_FACTOR * (1.0 + norm_m)
    reps = [rep for rep, _ in cluster_eigenvalues(eigenvalues(m), delta)]

    sv = np.linalg.svd(m, compute_uv=False)
    has_kernel = sv[-1] <= dim * sv[0] * KERNEL_RTOL if sv[0] > 0 else True
    if has_kernel:
        eig_sees_zero = min(abs(r) for r in reps) <= delta
        if not eig_sees_zero:
            # the eigensolver missed a certified kernel: its output for this
            # block is untrustworthy, so deflate the kernel itself
            return kernel_basis(m), False
        chosen = 0.0 + 0.0j
    else:
        chosen = min(reps, key=lambda z: (z.real, z.imag))

    space = kernel_basis(m - chosen * np.eye(dim))
    if space.shape[1] > 0:
        return space, False

    # empty at tolerance (cluster mean off every eigenvalue): generalized
    # eigenspace fallback
    gen = generalized_eigenspace(m, chosen, tol=KERNEL_RTOL)
    if gen.dim > 0:
        return gen.basis, True
    # last resort: the least-singular direction of (m - chosen I)
    _, _, vh = np.linalg.svd(m - chosen * np.eye(dim))
    return fix_column_phases(vh[-1:].conj().T), True


def _common_eigvec(mats: list[np.ndarray], tol: float) -> np.ndarray:
    dim = mats[0].shape[0] if mats else 1
    e1 = np.zeros(dim, dtype=np.complex128)
    e1[0] = 1.0
    if dim == 1 or not mats:
        return e1

    m = mats[0]
    mean = complex(np.trace(m)) / dim
    scalar_mass = float(np.linalg.norm(m - mean * np.eye(dim), "fro"))
    if scalar_mass <= _SCALAR_FRACTION * tol * (1.0 + float(np.linalg.norm(m, "fro"))):
        # near-scalar member constrains nothing
        return _common_eigvec(mats[1:], tol)

    space, terminal = _choose_eigenspace(m, tol)
    if terminal:
        return _ritz_vector(m, space)
    if space.shape[1] == 1 or len(mats) == 1:
        return space[:, 0]
    rest = [_compress(a, space) for a in mats[1:]]
    v = space @ _common_eigvec(rest, tol)
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else e1


def _unit_phase_fixed(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    piv = v[i]
    if abs(piv) > 0:
        v = v * (piv.conjugate() / abs(piv))
    return v


def _certified_common_eigvec(mats: list[np.ndarray], tol: float) -> np.ndarray:
    v = _unit_phase_fixed(_common_eigvec(list(mats), tol))
    residuals = _rayleigh_residuals(mats, v)
    bounds = [tol * (1.0 + float(np.linalg.norm(a, "fro"))) for a in mats]
    if any(r > b for r, b in zip(residuals, bounds)):
        raise JointEigenvectorError(
            "no joint eigenvector at tolerance "
            f"{tol:.1e}; residuals {[f'{r:.2e}' for r in residuals]}",
            residuals=residuals,
        )
    return v


def common_eigenvector(family: MatrixFamily, tol: float = DEFAULT_SCHUR_TOL) -> np.ndarray:
    """Unit vector v with A_i v ~ <v|A_i v> v for every member, or raise.

    The per-member Rayleigh residual must not exceed
    tol * (1 + ||A_i||_F); failure raises :class:`JointEigenvectorError`
    carrying all residuals.
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    return _certified_common_eigvec(list(family.members), tol)


def _embedding_unitary(v: np.ndarray) -> np.ndarray:
    """Unitary Q with Q e_1 = v, built from one Householder reflector."""
    n = v.shape[0]
    v0 = v[0]
    phi = v0 / abs(v0) if abs(v0) > 0 else 1.0 + 0.0j
    u = v.copy()
    u[0] += phi  # no cancellation: ||u||^2 = 2 (1 + |v0|)
    q = np.eye(n, dtype=np.complex128) - 2.0 * np.outer(u, u.conj()) / np.vdot(u, u).real
    q[:, 0] *= -phi
    return q


@dataclass(frozen=True, eq=False)
class SchurResult:
    """Simultaneous Schur form: one unitary, all members upper-triangular.

    ``residual`` is the largest relative strictly-lower-triangular mass
    discarded when the conjugated members were truncated to exact upper
    triangles; ``diag_lambdas[i]`` is the diagonal of T_i, i.e. the joint
    approximate eigenvalue tuples in deflation order.
    """

    unitary: np.ndarray
    triangulars: tuple[np.ndarray, ...]
    residual: float
    diag_lambdas: tuple[tuple[complex, ...], ...]

    def to_json(self) -> dict:
        return {
            "unitary": matrix_to_json(self.unitary),
            "triangulars": [matrix_to_json(t) for t in self.triangulars],
            "diag_lambdas": [
                [[z.real, z.imag] for z in row] for row in self.diag_lambdas
            ],
            "residual": float(self.residual),
        }


def simultaneous_schur(family: MatrixFamily, tol: float = DEFAULT_SCHUR_TOL) -> SchurResult:
    """Unitarily triangularize all members of a commuting family at once.

    Deflation loop: find a common eigenvector of the trailing blocks, map it
    to the leading coordinate with a Householder reflector, conjugate, and
    continue on the remaining (m-1)-dimensional blocks. The strict lower
    triangle left over by rounding is zeroed and reported as the residual.
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    n = family.dim
    unitary = np.eye(n, dtype=np.complex128)
    work = [np.array(a, dtype=np.complex128) for a in family.members]
    for step in range(n - 1):
        blocks = [t[step:, step:] for t in work]
        v = _certified_common_eigvec(blocks, tol)
        q = _embedding_unitary(v)
        for t in work:
            t[step:, step:] = q.conj().T @ t[step:, step:] @ q
            t[:step, step:] = t[:step, step:] @ q
        unitary[:, step:] = unitary[:, step:] @ q

    residual = 0.0
    for t, a in zip(work, family.members):
        mass = float(np.linalg.norm(np.tril(t, -1), "fro"))
        residual = max(residual, mass / (1.0 + float(np.linalg.norm(a, "fro"))))
    triangulars = tuple(np.triu(t) for t in work)
    diag_lambdas = tuple(
        tuple(complex(z) for z in np.diag(t)) for t in triangulars
    )
    return SchurResult(
        unitary=unitary,
        triangulars=triangulars,
        residual=residual,
        diag_lambdas=diag_lambdas,
    )
