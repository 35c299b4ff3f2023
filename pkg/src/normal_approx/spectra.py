"""Eigen-decompositions, generalized eigenspaces, and the numerical spread.

The numerical spread of a square matrix A is the diameter of its numerical
range W(A) = { <v|Av> : ||v|| = 1 }. W(A) is convex, so its diameter equals
the maximal directional width

    max over theta in [0, pi) of  [lambda_max - lambda_min]( Re(e^{-i theta} A) ),

which is what :func:`numerical_spread` evaluates: a uniform theta-grid sweep
(batched Hermitian eigensolves) followed by golden-section refinement around
the surviving local maxima. Dense nonsymmetric/Hermitian eigenproblems and
rank decisions are delegated to LAPACK via numpy.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_matrix, require_square
from .errors import InvalidInputError, SolverError

DEFAULT_GRID = 1024
DEFAULT_REFINE_ITERS = 40
KERNEL_RTOL = 1e-12
CLUSTER_DELTA_FACTOR = 1e-8

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def eigenvalues(a) -> np.ndarray:
    """All n eigenvalues with algebraic multiplicity, sorted by (Re, Im)."""
    a = require_square(as_matrix(a))
    try:
        w = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigenvalue iteration failed to converge: {exc}") from exc
    return w[np.lexsort((w.imag, w.real))]


def hermitian_eigen(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (nondecreasing, real) and orthonormal eigenvectors of a
    near-Hermitian matrix.

    The input must satisfy ||H - H*||_F <= 1e-8 (1 + ||H||_F); it is
    symmetrized internally and the residual contract holds for the
    symmetrized matrix.
    """
    h = require_square(as_matrix(h))
    skew = float(np.linalg.norm(h - h.conj().T, "fro"))
    if skew > 1e-8 * (1.0 + np.linalg.norm(h, "fro")):
        raise InvalidInputError(
            f"matrix is not Hermitian within tolerance (skew mass {skew:.3e})"
        )
    hs = (h + h.conj().T) / 2.0
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"Hermitian eigensolve failed: {exc}") from exc
    return w, v


def cluster_eigenvalues(values, delta: float) -> list[tuple[complex, list[int]]]:
    """Group eigenvalues whose chain-distance is at most ``delta``.

    Returns (representative, index list) pairs sorted by representative in
    (Re, Im) lexicographic order; the representative is the cluster mean.
    Merging is transitive along the lexicographically sorted sequence, which
    is how repeated eigenvalues perturbed by rounding reassemble.
    """
    w = np.asarray(values, dtype=np.complex128)
    if w.size == 0:
        return []
    order = np.lexsort((w.imag, w.real))
    groups: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if abs(w[idx] - w[groups[-1][-1]]) <= delta:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    out = [(complex(np.mean(w[g])), g) for g in groups]
    out.sort(key=lambda item: (item[0].real, item[0].imag))
    return out


def fix_column_phases(b: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive.

    Pins the phase ambiguity of SVD/eigenvector bases so identical inputs
    serialize to identical bytes.
    """
    b = np.array(b, dtype=np.complex128)
    for j in range(b.shape[1]):
        col = b[:, j]
        i = int(np.argmax(np.abs(col)))
        piv = col[i]
        if abs(piv) > 0:
            b[:, j] = col * (piv.conjugate() / abs(piv))
    return b


def kernel_basis(m, rtol: float = KERNEL_RTOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, by SVD thresholding.

    Rank is the number of singular values above max(rows, cols) * sigma_max
    * ``rtol``; the kernel is spanned by the remaining right singular
    vectors.
    """
    if rtol <= 0:
        raise InvalidInputError("kernel threshold factor must be positive")
    m = as_matrix(m)
    try:
        _, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SVD failed to converge: {exc}") from exc
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > max(m.shape) * s[0] * rtol))
    return fix_column_phases(vh[rank:].conj().T)


@dataclass(frozen=True, eq=False)
class EigenspaceBasis:
    """Orthonormal basis of a generalized eigenspace ker(lambda - A)^order."""

    eigenvalue: complex
    order: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def generalized_eigenspace(a, eigenvalue: complex, tol: float = KERNEL_RTOL) -> EigenspaceBasis:
    """Basis of the full generalized eigenspace of ``a`` at ``eigenvalue``.

    Powers (lambda I - A), rescaled to unit norm for overflow safety, until
    the kernel dimension stabilizes (at most dim steps); the reported order
    is the first power whose kernel already equals the stable one.
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    a = require_square(as_matrix(a))
    n = a.shape[0]
    b = eigenvalue * np.eye(n, dtype=np.complex128) - a
    scale = float(np.linalg.norm(b, "fro"))
    if scale == 0.0:
        # a is exactly the scalar eigenvalue: everything is the eigenspace
        return EigenspaceBasis(complex(eigenvalue), 1, np.eye(n, dtype=np.complex128))
    p = b / scale

    def kernel_of_power(mat: np.ndarray) -> np.ndarray:
        # ||p||_F = 1, so a power whose whole mass sits below the rank floor
        # is numerically zero and its kernel is everything; the relative SVD
        # threshold would misread its rounding dirt as full rank
        if float(np.linalg.norm(mat, "fro")) <= n * tol:
            return np.eye(n, dtype=np.complex128)
        return kernel_basis(mat, rtol=tol)

    power = p
    basis = kernel_of_power(power)
    order = 1
    dim = basis.shape[1]
    for m in range(2, n + 1):
        if dim == n:
            break
        power = power @ p
        nxt = kernel_of_power(power)
        if nxt.shape[1] == dim:
            break
        basis, dim, order = nxt, nxt.shape[1], m
    return EigenspaceBasis(complex(eigenvalue), order, basis)


@dataclass(frozen=True, eq=False)
class SpreadResult:
    """Numerical spread of a matrix with the maximizing direction and witnesses.

    ``witness_pair`` holds two Rayleigh quotients <v|Av> of unit vectors
    (the extreme eigenvectors of Re(e^{-i theta*} A)); their distance never
    exceeds the reported spread. ``grid_error_bound`` is the Lipschitz bound
    ||A||_F * pi / grid on how much the grid sweep can undershoot the true
    maximal width; the vectors themselves are kept for re-evaluation.
    """

    spread: float
    theta_star: float
    witness_pair: tuple[complex, complex]
    grid_points: int
    grid_error_bound: float
    witness_vectors: tuple[np.ndarray, np.ndarray]

    def to_json(self) -> dict:
        return {
            "spread": float(self.spread),
            "theta_star": float(self.theta_star),
            "witnesses": [
                [float(z.real), float(z.imag)] for z in self.witness_pair
            ],
            "grid_points": int(self.grid_points),
        }


def _width_batch(a: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Directional widths [lambda_max - lambda_min](Re(e^{-i theta} A))."""
    n = a.shape[0]
    widths = np.empty(thetas.shape[0])
    # cap the batch so the stacked Hermitian matrices stay modest in memory
    chunk = max(1, int(4_194_304 // max(1, n * n)))
    for lo in range(0, thetas.shape[0], chunk):
        th = thetas[lo : lo + chunk]
        ph = np.exp(-1j * th)
        stack = 0.5 * (
            ph[:, None, None] * a[None, :, :]
            + ph.conj()[:, None, None] * a.conj().T[None, :, :]
        )
        try:
            ev = np.linalg.eigvalsh(stack)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"Hermitian eigensolve failed in spread sweep: {exc}") from exc
        widths[lo : lo + chunk] = ev[:, -1] - ev[:, 0]
    return widths


def _width_at(a: np.ndarray, theta: float) -> float:
    return float(_width_batch(a, np.array([theta]))[0])


def _grid_local_maxima(widths: np.ndarray, cap: int = 8) -> list[int]:
    """Indices of cyclic local maxima, plateau runs deduped, best ``cap`` kept."""
    left = np.roll(widths, 1)
    right = np.roll(widths, -1)
    cand = np.where((widths >= left) & (widths >= right))[0]
    if cand.size == 0:
        return [int(np.argmax(widths))]
    keep: list[int] = []
    prev = None
    for t in cand:
        t = int(t)
        if prev is not None and t - prev == 1:
            prev = t
            continue
        keep.append(t)
        prev = t
    # a plateau wrapping around the end duplicates index 0; drop it
    if len(keep) > 1 and keep[0] == 0 and cand[-1] == widths.shape[0] - 1:
        keep = keep[1:] if widths[0] == widths[keep[1]] else keep
    keep.sort(key=lambda t: (-widths[t], t))
    return keep[:cap]


def numerical_spread(
    a,
    grid: int = DEFAULT_GRID,
    refine_iters: int = DEFAULT_REFINE_ITERS,
) -> SpreadResult:
    """Diameter of the numerical range, via the directional-width sweep.

    Every grid local maximum is refined by golden section (``refine_iters``
    steps) and the best refined direction wins, ties broken toward smaller
    theta. The result is a lower bound on the true diameter that is exact
    to refinement accuracy; witnesses are Rayleigh quotients at theta*.
    """
    a = require_square(as_matrix(a))
    if grid < 16:
        raise InvalidInputError("spread grid must be at least 16")
    if refine_iters < 0:
        raise InvalidInputError("refinement iteration count must be nonnegative")
    n = a.shape[0]
    thetas = np.arange(grid) * (np.pi / grid)
    widths = _width_batch(a, thetas)
    h = np.pi / grid

    best_theta = 0.0
    best_width = -np.inf
    for t in sorted(_grid_local_maxima(widths)):
        lo, hi = thetas[t] - h, thetas[t] + h
        x1 = hi - _GOLDEN * (hi - lo)
        x2 = lo + _GOLDEN * (hi - lo)
        f1 = _width_at(a, x1)
        f2 = _width_at(a, x2)
        for _ in range(refine_iters):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + _GOLDEN * (hi - lo)
                f2 = _width_at(a, x2)
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - _GOLDEN * (hi - lo)
                f1 = _width_at(a, x1)
        theta_c = 0.5 * (lo + hi)
        cand = [(float(widths[t]), float(thetas[t])), (f1, x1), (f2, x2),
                (_width_at(a, theta_c), theta_c)]
        for f, x in cand:
            if f > best_width:
                best_width, best_theta = f, x

    best_theta = float(np.mod(best_theta, np.pi))
    hmat = 0.5 * (np.exp(-1j * best_theta) * a + np.exp(1j * best_theta) * a.conj().T)
    try:
        _, vecs = np.linalg.eigh(hmat)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"Hermitian eigensolve failed at theta*: {exc}") from exc
    v_hi = vecs[:, -1]
    v_lo = vecs[:, 0]
    z_hi = complex(np.vdot(v_hi, a @ v_hi))
    z_lo = complex(np.vdot(v_lo, a @ v_lo))
    # |z_hi - z_lo| is also a valid lower bound for the diameter and can only
    # sharpen the grid value; reporting the max keeps the witness invariant.
    spread = max(float(best_width), abs(z_hi - z_lo), 0.0)
    bound = float(np.linalg.norm(a, "fro")) * np.pi / grid
    return SpreadResult(
        spread=spread,
        theta_star=best_theta,
        witness_pair=(z_hi, z_lo),
        grid_points=int(grid),
        grid_error_bound=bound,
        witness_vectors=(v_hi, v_lo),
    )


def spectral_diameter(a) -> float:
    """Largest pairwise distance among the eigenvalues."""
    w = eigenvalues(a)
    if w.size == 1:
        return 0.0
    diff = np.abs(w[:, None] - w[None, :])
    return float(diff.max())
