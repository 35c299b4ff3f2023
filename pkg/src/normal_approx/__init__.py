"""Nearby commuting normal families for commuting matrix families.

Given commuting complex matrices (A_i), construct a commuting *normal*
family (B_i) with

    sum_i ||A_i - B_i||_2^2  <=  n * spread( sum_i A_i* A_i ),

where spread is the diameter of the numerical range. The package provides
the construction (simultaneous unitary triangularization + diagonal
extraction), certification of the bound, the scalar-gram-sum normality
check, the quasi-nilpotent/normal subspace split, seeded family
generators, and a batch CLI (``normal-approx``).
"""

__version__ = "0.1.0"

from .approx import (
    BoundReport,
    NormalityReport,
    certify_bound,
    fraas_check,
    normal_approximation,
    normality_defect,
    putnam_fuglede_defect,
)
from .core import (
    DEFAULT_COMMUTATION_TOL,
    MatrixFamily,
    adjoint,
    as_matrix,
    commutator_defect,
    family_from_json,
    family_to_json,
    gram_sum,
    hs_norm,
    hs_norm_normalized,
    load_family,
    load_matrix,
    matmul,
    matrix_from_json,
    matrix_to_json,
    save_family,
    save_matrix,
)
from .errors import (
    CommutationError,
    InvalidInputError,
    JointEigenvectorError,
    NormalApproxError,
    ShapeError,
    SolverError,
    SubspaceError,
)
from .generators import (
    GeneratorSpec,
    build_family,
    cholesky_counterexample,
    cholesky_upper,
    gen_nilpotent_plus_normal,
    gen_planted_normal_scalar_sum,
    gen_planted_triangular,
    gen_poly_in_one,
    truncated_shift,
)
from .rng import CounterRng, derive_seed, mix64
from .spectra import (
    EigenspaceBasis,
    SpreadResult,
    cluster_eigenvalues,
    eigenvalues,
    generalized_eigenspace,
    hermitian_eigen,
    kernel_basis,
    numerical_spread,
    spectral_diameter,
)
from .splitting import SplitResult, joint_quasinilpotent_space, spectral_radius, split
from .triangular import (
    SchurResult,
    common_eigenvector,
    restrict_to_subspace,
    simultaneous_schur,
)

__all__ = [
    "BoundReport",
    "CommutationError",
    "CounterRng",
    "DEFAULT_COMMUTATION_TOL",
    "EigenspaceBasis",
    "GeneratorSpec",
    "InvalidInputError",
    "JointEigenvectorError",
    "MatrixFamily",
    "NormalApproxError",
    "NormalityReport",
    "SchurResult",
    "ShapeError",
    "SolverError",
    "SpreadResult",
    "SplitResult",
    "SubspaceError",
    "adjoint",
    "as_matrix",
    "build_family",
    "certify_bound",
    "cholesky_counterexample",
    "cholesky_upper",
    "cluster_eigenvalues",
    "common_eigenvector",
    "commutator_defect",
    "derive_seed",
    "eigenvalues",
    "family_from_json",
    "family_to_json",
    "fraas_check",
    "gen_nilpotent_plus_normal",
    "gen_planted_normal_scalar_sum",
    "gen_planted_triangular",
    "gen_poly_in_one",
    "generalized_eigenspace",
    "gram_sum",
    "hermitian_eigen",
    "hs_norm",
    "hs_norm_normalized",
    "joint_quasinilpotent_space",
    "kernel_basis",
    "load_family",
    "load_matrix",
    "matmul",
    "matrix_from_json",
    "matrix_to_json",
    "mix64",
    "normal_approximation",
    "normality_defect",
    "numerical_spread",
    "putnam_fuglede_defect",
    "restrict_to_subspace",
    "save_family",
    "save_matrix",
    "simultaneous_schur",
    "spectral_diameter",
    "spectral_radius",
    "split",
    "truncated_shift",
]
