"""Nearby commuting normal families and certification of the spread bound.

For a commuting family (A_i) the diagonals of a simultaneous Schur form,
conjugated back to the original basis, give a commuting *normal* family
(B_i) whose squared Hilbert-Schmidt distance from (A_i) is at most

    n * spread( sum_i A_i* A_i ).

:func:`certify_bound` computes both sides and reports whether the
inequality holds; :func:`fraas_check` tests the scalar-gram-sum condition
under which the distance collapses to zero (every member already normal).
"""

from dataclasses import dataclass

import numpy as np

from .core import MatrixFamily, gram_sum, hs_norm
from .errors import InvalidInputError
from .spectra import DEFAULT_GRID, SpreadResult, numerical_spread
from .triangular import DEFAULT_SCHUR_TOL, SchurResult, simultaneous_schur

CERTIFY_REL_SLACK = 1e-8
CERTIFY_ABS_SLACK = 1e-10
DEFAULT_NORMALITY_TOL = 1e-8


def normality_defect(a: np.ndarray) -> float:
    """||A A* - A* A||_F, zero exactly when A is normal."""
    return float(np.linalg.norm(a @ a.conj().T - a.conj().T @ a, "fro"))


def normal_approximation(
    family: MatrixFamily, tol: float = DEFAULT_SCHUR_TOL
) -> tuple[MatrixFamily, SchurResult]:
    """Commuting normal family B_i = U diag(T_i) U* next to the input.

    The B_i share the eigenbasis U, so they are normal and commute exactly
    up to rounding regardless of how ill-conditioned the input was. They
    are returned in the original basis, where the distances ||A_i - B_i||
    are the meaningful quantities.
    """
    schur = simultaneous_schur(family, tol=tol)
    u = schur.unitary
    members = tuple(
        u @ np.diag(np.diag(t)) @ u.conj().T for t in schur.triangulars
    )
    approx = MatrixFamily(members, commutation_tolerance=max(
        family.commutation_tolerance, 1e-9,
    ))
    return approx, schur


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Both sides of the distance bound for one family, plus diagnostics.

    lhs_unnormalized = sum_i ||A_i - B_i||_2^2 and rhs_unnormalized =
    n * spread(gram sum); the normalized fields divide by n (matching the
    normalized Hilbert-Schmidt convention). ``certified`` records whether
    lhs <= rhs (1 + 1e-8) + 1e-10 held.
    """

    n: int
    k: int
    lhs_unnormalized: float
    rhs_unnormalized: float
    lhs_normalized: float
    rhs_normalized: float
    ratio: float
    certified: bool
    spread_diag: SpreadResult
    schur_residual: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "lhs_unnormalized": self.lhs_unnormalized,
            "rhs_unnormalized": self.rhs_unnormalized,
            "lhs_normalized": self.lhs_normalized,
            "rhs_normalized": self.rhs_normalized,
            "ratio": self.ratio,
            "certified": self.certified,
            "schur_residual": self.schur_residual,
            "spread": self.spread_diag.to_json(),
        }


def certify_bound(
    family: MatrixFamily,
    spread_grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_SCHUR_TOL,
) -> BoundReport:
    """Construct the normal family and certify lhs <= rhs for the input.

    A violated inequality sets ``certified`` False in the report rather
    than raising: the caller decides whether that is fatal.
    """
    approx, schur = normal_approximation(family, tol=tol)
    n = family.dim
    lhs = float(sum(hs_norm(a - b) ** 2 for a, b in zip(family.members, approx.members)))
    spread_diag = numerical_spread(gram_sum(family), grid=spread_grid)
    rhs = n * spread_diag.spread
    certified = lhs <= rhs * (1.0 + CERTIFY_REL_SLACK) + CERTIFY_ABS_SLACK
    if rhs > CERTIFY_ABS_SLACK:
        ratio = lhs / rhs
    else:
        # scalar gram sum: the bound forces lhs ~ 0 as well; 0/0 reads as 0
        ratio = 0.0 if lhs <= CERTIFY_ABS_SLACK else float("inf")
    return BoundReport(
        n=n,
        k=family.size,
        lhs_unnormalized=lhs,
        rhs_unnormalized=rhs,
        lhs_normalized=lhs / n,
        rhs_normalized=spread_diag.spread,
        ratio=ratio,
        certified=certified,
        spread_diag=spread_diag,
        schur_residual=schur.residual,
    )


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of the scalar-gram-sum (Fraas condition) check."""

    normality_defects: tuple[float, ...]
    gram_spread: float
    scalar_estimate: complex
    tolerance: float
    verdict: bool

    def to_json(self) -> dict:
        return {
            "normality_defects": list(self.normality_defects),
            "gram_spread": self.gram_spread,
            "scalar_estimate": [self.scalar_estimate.real, self.scalar_estimate.imag],
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def fraas_check(
    family: MatrixFamily,
    tol: float = DEFAULT_NORMALITY_TOL,
    spread_grid: int = DEFAULT_GRID,
) -> NormalityReport:
    """Verdict true iff the gram sum is scalar and every member normal, at ``tol``.

    For a commuting family these two facts come together: a scalar gram sum
    forces normality of each member. The report carries the evidence either
    way: per-member normality defects, the gram-sum spread, and the scalar
    the gram sum approximates (mean of its diagonal).
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    g = gram_sum(family)
    spread = numerical_spread(g, grid=spread_grid).spread
    defects = tuple(normality_defect(a) for a in family.members)
    gram_ok = spread <= tol * (1.0 + float(np.linalg.norm(g, "fro")))
    members_ok = all(
        d <= tol * (1.0 + float(np.linalg.norm(a, "fro")) ** 2)
        for d, a in zip(defects, family.members)
    )
    return NormalityReport(
        normality_defects=defects,
        gram_spread=float(spread),
        scalar_estimate=complex(np.trace(g)) / family.dim,
        tolerance=tol,
        verdict=bool(gram_ok and members_ok),
    )


def putnam_fuglede_defect(
    family: MatrixFamily, tol: float = DEFAULT_NORMALITY_TOL
) -> float:
    """Largest adjoint-commutation defect max_{i,j} ||B_i B_j* - B_j* B_i||_F.

    Commutation with a normal matrix entails commutation with its adjoint,
    so for a commuting family of normal matrices this is zero up to
    rounding. Members must be normal within ``tol`` (relative to
    1 + ||B_i||_F^2); a non-normal member is a precondition violation.
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    for idx, b in enumerate(family.members):
        defect = normality_defect(b)
        bound = tol * (1.0 + float(np.linalg.norm(b, "fro")) ** 2)
        if defect > bound:
            raise InvalidInputError(
                f"member {idx} is not normal within tolerance: defect {defect:.3e} "
                f"exceeds {bound:.3e}"
            )
    worst = 0.0
    for bi in family.members:
        for bj in family.members:
            worst = max(
                worst,
                float(np.linalg.norm(bi @ bj.conj().T - bj.conj().T @ bi, "fro")),
            )
    return worst
