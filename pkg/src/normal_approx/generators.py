"""Seeded generators of commuting families and the standard model matrices.

Every generator is a pure function of its arguments: the same spec
regenerates the same family byte for byte (see :mod:`normal_approx.rng`
for the PRNG contract). The model zoo covers the regimes the theory talks
about: polynomials in one matrix (generic commuting families), planted
normal families with scalar gram sum, planted triangular families,
nilpotent-plus-normal block models with known split dimensions, truncated
shifts, and the non-commuting Cholesky pair showing that simultaneous
triangularizability alone is not enough.
"""

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_COMMUTATION_TOL, MatrixFamily, as_matrix
from .errors import InvalidInputError
from .rng import CounterRng

GENERATOR_KINDS = (
    "poly_in_one",
    "planted_normal_scalar_sum",
    "planted_triangular",
    "nilpotent_plus_normal",
    "truncated_shift",
    "cholesky_counterexample",
)

_POLY_DEGREE = 4
_NORM_WINDOW = (0.5, 2.0)


@dataclass(frozen=True)
class GeneratorSpec:
    """Serializable recipe for one deterministic family."""

    kind: str
    n: int = 2
    k: int = 1
    seed: int = 0
    scale: float = 1.0
    n_qn: int | None = None
    n_n: int | None = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise InvalidInputError(
                f"unknown generator kind {self.kind!r}; expected one of {GENERATOR_KINDS}"
            )
        if self.scale <= 0:
            raise InvalidInputError("scale must be positive")
        if self.kind == "nilpotent_plus_normal":
            if self.n_qn is None or self.n_n is None:
                raise InvalidInputError(
                    "nilpotent_plus_normal needs n_qn and n_n block dimensions"
                )
            if self.n_qn < 0 or self.n_n < 0 or self.n_qn + self.n_n < 1:
                raise InvalidInputError("block dimensions must be nonnegative, not both zero")
        elif self.n < 1:
            raise InvalidInputError("dimension must be positive")
        if self.k < 1:
            raise InvalidInputError("family size must be positive")

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "scale": self.scale,
        }
        if self.n_qn is not None:
            out["n_qn"] = self.n_qn
        if self.n_n is not None:
            out["n_n"] = self.n_n
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GeneratorSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InvalidInputError("generator spec JSON must be an object with 'kind'")
        known = {"kind", "n", "k", "seed", "scale", "n_qn", "n_n"}
        unknown = set(obj) - known
        if unknown:
            raise InvalidInputError(f"unknown generator spec fields: {sorted(unknown)}")
        return cls(**obj)


def _random_poly_of(base: np.ndarray, rng: CounterRng) -> np.ndarray:
    n = base.shape[0]
    coeffs = rng.complex_normal(_POLY_DEGREE + 1)
    p = np.zeros((n, n), dtype=np.complex128)
    for c in coeffs[::-1]:
        p = p @ base + c * np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(p, "fro"))
    target = float(rng.uniform_range(*_NORM_WINDOW, 1)[0])
    if norm < np.finfo(float).tiny:
        return target / np.sqrt(n) * np.eye(n, dtype=np.complex128)
    return p * (target / norm)


def gen_poly_in_one(n: int, k: int, seed: int, scale: float = 1.0) -> MatrixFamily:
    """k random degree-<=4 polynomials in one Gaussian matrix.

    Polynomials in a single matrix commute exactly, so this is the generic
    source of commuting families; each member is rescaled to a Frobenius
    norm drawn from [0.5, 2] (times ``scale``).
    """
    if n < 1 or k < 1:
        raise InvalidInputError("need n >= 1 and k >= 1")
    rng = CounterRng(seed)
    base = rng.complex_matrix(n, n)
    members = tuple(scale * _random_poly_of(base, rng) for _ in range(k))
    return MatrixFamily(members)


def _haar_unitary(n: int, rng: CounterRng) -> np.ndarray:
    g = rng.complex_matrix(n, n)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phases[None, :]


def gen_planted_normal_scalar_sum(n: int, k: int, seed: int, scale: float = 1.0) -> MatrixFamily:
    """Commuting normal family with gram sum = scale^2 * identity.

    One random unitary U diagonalizes every member; the k diagonal values at
    each coordinate form a uniformly random unit vector of C^k, which makes
    sum_i A_i* A_i scalar by construction.
    """
    if n < 1 or k < 1:
        raise InvalidInputError("need n >= 1 and k >= 1")
    rng = CounterRng(seed)
    u = _haar_unitary(n, rng)
    cols = rng.complex_normal(n * k).reshape(k, n)
    norms = np.linalg.norm(cols, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    cols = cols / norms[None, :]
    members = tuple(
        scale * (u @ np.diag(cols[i]) @ u.conj().T) for i in range(k)
    )
    return MatrixFamily(members)


def gen_planted_triangular(n: int, k: int, seed: int, scale: float = 1.0) -> MatrixFamily:
    """Commuting family of upper-triangular matrices.

    Polynomials in one random upper-triangular matrix; members stay exactly
    upper triangular and commute exactly.
    """
    if n < 1 or k < 1:
        raise InvalidInputError("need n >= 1 and k >= 1")
    rng = CounterRng(seed)
    base = np.triu(rng.complex_matrix(n, n))
    members = tuple(scale * np.triu(_random_poly_of(base, rng)) for _ in range(k))
    return MatrixFamily(members)


def gen_nilpotent_plus_normal(
    n_qn: int, n_n: int, k: int, seed: int, scale: float = 1.0
) -> MatrixFamily:
    """Planted block model: nilpotent block (+) normal block, hidden by a unitary.

    The nilpotent blocks are powers of one strictly upper-triangular matrix
    (member i uses power 1 + (i mod max(n_qn - 1, 1))); the normal blocks
    share one eigenbasis with eigenvalue moduli in [0.5, 2], keeping the
    normal part safely invertible. The planted split dimensions are the
    arguments themselves.
    """
    if n_qn < 0 or n_n < 0 or n_qn + n_n < 1:
        raise InvalidInputError("block dimensions must be nonnegative, not both zero")
    if k < 1:
        raise InvalidInputError("family size must be positive")
    n = n_qn + n_n
    rng = CounterRng(seed)

    nil_base = np.zeros((n_qn, n_qn), dtype=np.complex128)
    if n_qn > 1:
        nil_base = np.triu(rng.complex_matrix(n_qn, n_qn), 1)
        base_norm = float(np.linalg.norm(nil_base, "fro"))
        if base_norm > 0:
            nil_base /= base_norm

    v = _haar_unitary(n_n, rng) if n_n else np.zeros((0, 0), dtype=np.complex128)
    w = _haar_unitary(n, rng)

    members = []
    for i in range(k):
        block = np.zeros((n, n), dtype=np.complex128)
        if n_qn:
            power = 1 + (i % max(n_qn - 1, 1))
            nil = np.linalg.matrix_power(nil_base, power) if n_qn > 1 else nil_base
            block[:n_qn, :n_qn] = nil
        if n_n:
            moduli = rng.uniform_range(0.5, 2.0, n_n)
            phases = np.exp(2j * np.pi * rng.uniform(n_n))
            block[n_qn:, n_qn:] = v @ np.diag(moduli * phases) @ v.conj().T
        members.append(scale * (w @ block @ w.conj().T))
    return MatrixFamily(tuple(members))


def truncated_shift(n: int) -> np.ndarray:
    """Finite section of the unilateral shift: maps e_j to e_{j+1}.

    Column-action convention: entry [j+1, j] = 1 (ones on the first
    subdiagonal), everything else zero; nilpotent with S^n = 0 and
    S* S = diag(1, ..., 1, 0).
    """
    if n < 2:
        raise InvalidInputError("truncated shift needs dimension at least 2")
    s = np.zeros((n, n), dtype=np.complex128)
    for j in range(n - 1):
        s[j + 1, j] = 1.0
    return as_matrix(s)


def cholesky_counterexample() -> tuple[np.ndarray, np.ndarray]:
    """The non-commuting pair with gram sum exactly the identity.

    Upper-triangular Cholesky factors of the two rank-1 projections onto
    (e1 +- e2)/sqrt(2): each is non-normal, the pair does not commute, yet
    A1* A1 + A2* A2 = I. Shows the commutativity hypothesis cannot be
    relaxed to simultaneous upper-triangularizability.
    """
    c = 1.0 / np.sqrt(2.0)
    a1 = as_matrix([[c, c], [0.0, 0.0]])
    a2 = as_matrix([[c, -c], [0.0, 0.0]])
    return a1, a2


def cholesky_upper(p, tol: float = 1e-8) -> np.ndarray:
    """Upper-triangular T with T* T = P for Hermitian positive semidefinite P.

    Pivot-free semidefinite factorization: pivots that vanish under the
    rank threshold produce zero rows, so rank-deficient input is fine.
    An eigenvalue below -tol * (1 + ||P||_F) means P is indefinite and is
    rejected.
    """
    p = as_matrix(p)
    if p.shape[0] != p.shape[1]:
        raise InvalidInputError("Cholesky input must be square")
    n = p.shape[0]
    norm_p = float(np.linalg.norm(p, "fro"))
    if float(np.linalg.norm(p - p.conj().T, "fro")) > 1e-10 * (1.0 + norm_p):
        raise InvalidInputError("Cholesky input must be Hermitian within 1e-10")
    ph = (p + p.conj().T) / 2.0
    if float(np.linalg.eigvalsh(ph)[0]) < -tol * (1.0 + norm_p):
        raise InvalidInputError("Cholesky input is indefinite")
    piv_tol = n * max(float(np.max(np.abs(np.diag(ph)))), 0.0) * 1e-12
    t = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        head = t[:i, i]
        piv2 = float((ph[i, i] - np.vdot(head, head)).real)
        if piv2 <= piv_tol:
            continue  # vanished pivot: leave row i zero
        piv = np.sqrt(piv2)
        t[i, i] = piv
        if i + 1 < n:
            t[i, i + 1 :] = (ph[i, i + 1 :] - t[:i, i].conj() @ t[:i, i + 1 :]) / piv
    return t


def build_family(spec: GeneratorSpec) -> MatrixFamily:
    """Materialize the family a :class:`GeneratorSpec` describes.

    The Cholesky counterexample pair does not commute and therefore cannot
    be a :class:`MatrixFamily`; ask for it via
    :func:`cholesky_counterexample` instead.
    """
    if spec.kind == "poly_in_one":
        return gen_poly_in_one(spec.n, spec.k, spec.seed, spec.scale)
    if spec.kind == "planted_normal_scalar_sum":
        return gen_planted_normal_scalar_sum(spec.n, spec.k, spec.seed, spec.scale)
    if spec.kind == "planted_triangular":
        return gen_planted_triangular(spec.n, spec.k, spec.seed, spec.scale)
    if spec.kind == "nilpotent_plus_normal":
        return gen_nilpotent_plus_normal(spec.n_qn, spec.n_n, spec.k, spec.seed, spec.scale)
    if spec.kind == "truncated_shift":
        return MatrixFamily((spec.scale * truncated_shift(spec.n),),
                            commutation_tolerance=DEFAULT_COMMUTATION_TOL)
    raise InvalidInputError(
        "the Cholesky counterexample pair does not commute; "
        "use cholesky_counterexample() for the raw pair"
    )
