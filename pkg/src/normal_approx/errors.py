"""Exception types shared across the package."""


class NormalApproxError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(NormalApproxError, ValueError):
    """Input violates a documented precondition (non-finite data, bad tolerance, ...)."""


class ShapeError(InvalidInputError):
    """Matrix dimensions are inconsistent with the requested operation."""


class CommutationError(InvalidInputError):
    """A family failed the pairwise commutation check at its tolerance."""

    def __init__(self, message: str, i: int, j: int, defect: float, bound: float):
        super().__init__(message)
        self.i = i
        self.j = j
        self.defect = defect
        self.bound = bound


class SubspaceError(InvalidInputError):
    """A subspace expected to be invariant under an operator is not."""


class SolverError(NormalApproxError, RuntimeError):
    """A numerical solver failed to converge or produced unusable output."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class JointEigenvectorError(SolverError):
    """No joint eigenvector could be certified at the requested tolerance.

    Carries the per-member Rayleigh residuals of the best candidate found,
    so callers can distinguish excessive non-commutativity from
    ill-conditioning.
    """

    def __init__(self, message: str, residuals: tuple[float, ...]):
        super().__init__(message, residual=max(residuals) if residuals else None)
        self.residuals = residuals
