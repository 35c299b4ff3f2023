"""Dense complex matrices, Hilbert-Schmidt norms, commuting families, file format.

Matrices are plain ``numpy.ndarray`` values of dtype complex128. The helpers
here validate shapes and finiteness at the package boundary; internal code
then uses ordinary numpy arithmetic.

File format (stable contract): a matrix is the JSON object

    {"rows": r, "cols": c, "data": [[re, im], ...]}

with ``data`` row-major and of length ``r*c``; a family is
``{"members": [matrix, ...]}``. Readers reject length mismatches and
non-finite numbers.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CommutationError, InvalidInputError, ShapeError

DEFAULT_COMMUTATION_TOL = 1e-10


def as_matrix(values) -> np.ndarray:
    """Coerce to a read-only 2-D complex128 array, rejecting non-finite entries."""
    m = np.array(values, dtype=np.complex128, order="C")
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a 2-D matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InvalidInputError("matrix contains NaN or infinite entries")
    m.flags.writeable = False
    return m


def require_square(m: np.ndarray) -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm: sqrt of the sum of squared entry moduli."""
    m = as_matrix(m)
    return float(np.linalg.norm(m, "fro"))


def hs_norm_normalized(m) -> float:
    """Normalized Hilbert-Schmidt norm hs_norm(m)/sqrt(n) for square n-by-n m."""
    m = require_square(as_matrix(m))
    return hs_norm(m) / np.sqrt(m.shape[0])


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def commutator_defect(a, b) -> float:
    """Frobenius norm of the commutator ab - ba."""
    a = require_square(as_matrix(a))
    b = require_square(as_matrix(b))
    if a.shape != b.shape:
        raise ShapeError(f"commutator needs equal shapes, got {a.shape} and {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a, "fro"))


@dataclass(frozen=True)
class MatrixFamily:
    """Ordered finite tuple of same-size square matrices that pairwise commute.

    Construction verifies, for every pair (i, j),

        ||A_i A_j - A_j A_i||_F <= tol * (1 + ||A_i||_F * ||A_j||_F)

    and raises :class:`CommutationError` otherwise, so holding a family is a
    certificate of (approximate) commutativity at its tolerance.
    """

    members: tuple[np.ndarray, ...]
    commutation_tolerance: float = DEFAULT_COMMUTATION_TOL
    _max_defect: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        if not self.members:
            raise InvalidInputError("a family needs at least one member")
        if self.commutation_tolerance < 0:
            raise InvalidInputError("commutation tolerance must be nonnegative")
        mats = tuple(require_square(as_matrix(m)) for m in self.members)
        n = mats[0].shape[0]
        for m in mats:
            if m.shape[0] != n:
                raise ShapeError("family members must share one dimension")
        object.__setattr__(self, "members", mats)
        norms = [np.linalg.norm(m, "fro") for m in mats]
        worst = 0.0
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                defect = float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i], "fro"))
                bound = self.commutation_tolerance * (1.0 + norms[i] * norms[j])
                if defect > bound:
                    raise CommutationError(
                        f"members {i} and {j} do not commute: defect {defect:.3e} "
                        f"exceeds {bound:.3e}",
                        i=i, j=j, defect=defect, bound=bound,
                    )
                worst = max(worst, defect)
        object.__setattr__(self, "_max_defect", worst)

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def max_commutation_defect(self) -> float:
        return self._max_defect

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]


def gram_sum(family: MatrixFamily) -> np.ndarray:
    """Sum of A_i* A_i over the family, symmetrized to kill rounding skew.

    The result is Hermitian positive semidefinite up to rounding; the
    symmetrization (S + S*)/2 is applied before return so downstream
    spectral code sees an exactly Hermitian matrix.
    """
    s = np.zeros((family.dim, family.dim), dtype=np.complex128)
    for a in family.members:
        s += a.conj().T @ a
    return (s + s.conj().T) / 2.0


# ---------------------------------------------------------------------------
# JSON file format


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    rows, cols = m.shape
    flat = m.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InvalidInputError("matrix JSON must be an object")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix JSON: {exc}") from exc
    if rows < 1 or cols < 1:
        raise InvalidInputError("matrix dimensions must be positive")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise InvalidInputError(
            f"matrix data length {len(data) if isinstance(data, list) else '?'} "
            f"does not match rows*cols = {rows * cols}"
        )
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise InvalidInputError(f"entry {i} is not an [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (np.isfinite(re) and np.isfinite(im)):
            raise InvalidInputError(f"entry {i} is not finite")
        out[i] = complex(re, im)
    return as_matrix(out.reshape(rows, cols))


def members_to_json(members) -> dict:
    """Family-file payload for a raw member list (no commutation check)."""
    return {"members": [matrix_to_json(m) for m in members]}


def family_to_json(family: MatrixFamily) -> dict:
    return members_to_json(family.members)


def family_from_json(obj, commutation_tolerance: float = DEFAULT_COMMUTATION_TOL) -> MatrixFamily:
    if not isinstance(obj, dict) or "members" not in obj:
        raise InvalidInputError("family JSON must be an object with a 'members' list")
    members = obj["members"]
    if not isinstance(members, list) or not members:
        raise InvalidInputError("family 'members' must be a nonempty list")
    mats = tuple(matrix_from_json(m) for m in members)
    return MatrixFamily(mats, commutation_tolerance=commutation_tolerance)


def save_matrix(m, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(m), fh)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def save_family(family: MatrixFamily, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(family_to_json(family), fh)
        fh.write("\n")


def load_family(path, commutation_tolerance: float = DEFAULT_COMMUTATION_TOL) -> MatrixFamily:
    with open(path, "r", encoding="utf-8") as fh:
        return family_from_json(json.load(fh), commutation_tolerance=commutation_tolerance)
