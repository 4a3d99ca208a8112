"""Dense complex matrix kernel.

Thin, deterministic wrappers around LAPACK (via numpy/scipy) that every
other module builds on: linear solves with explicit pivot guards,
singular values, general eigendecompositions and condition estimates.
All functions treat their inputs as immutable and return fresh arrays.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NonFinite, SingularMatrix, StructureViolation

#: relative pivot threshold below which a factorization is declared singular
PIVOT_RTOL = 1e-14

#: default relative tolerance for the Hermitian/symmetric views
VIEW_TOL = 1e-12


def as_cmatrix(M):
    """Coerce to a 2-d complex ndarray, rejecting non-finite entries."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise NonFinite("matrix contains NaN or Inf entries")
    return M


def _require_square(M, who):
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{who} requires a square matrix, got {M.shape}")


def solve_linear(M, rhs, pivot_rtol=PIVOT_RTOL):
    """Solve M X = rhs by LU with partial pivoting.

    Raises SingularMatrix (with a reciprocal condition estimate) when the
    smallest pivot falls below ``pivot_rtol * ||M||_F``.
    """
    M = as_cmatrix(M)
    rhs = as_cmatrix(rhs)
    _require_square(M, "solve_linear")
    if rhs.shape[0] != M.shape[0]:
        raise DimensionMismatch(
            f"rhs has {rhs.shape[0]} rows, matrix has order {M.shape[0]}")
    with warnings.catch_warnings():
        # zero pivots are detected below and raised as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = np.linalg.norm(M)
    pmin = pivots.min()
    if pmin <= pivot_rtol * scale:
        rcond = pmin / pivots.max() if pivots.max() > 0 else 0.0
        raise SingularMatrix(
            f"pivot {pmin:.3e} below threshold {pivot_rtol * scale:.3e}",
            rcond=rcond)
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def singular_values(M):
    """Singular values of M, nonincreasing."""
    M = as_cmatrix(M)
    return scipy.linalg.svdvals(M, check_finite=False)


def dense_eig(M):
    """Eigenvalues plus right and left eigenvectors of a square matrix.

    Right vectors V have unit-norm columns with M V = V diag(w); left
    vectors W satisfy W[:,i]^H M = w[i] W[:,i]^H.
    """
    M = as_cmatrix(M)
    _require_square(M, "dense_eig")
    try:
        w, W, V = scipy.linalg.eig(M, left=True, right=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise NoConvergence(str(exc)) from exc
    return w, V, W


def cond_estimate(M):
    """2-norm condition number sigma_max / sigma_min (inf if rank deficient)."""
    M = as_cmatrix(M)
    _require_square(M, "cond_estimate")
    s = singular_values(M)
    if s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


def _symmetry_defect(M, adjoint):
    nrm = np.linalg.norm(M)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(M - adjoint) / nrm)


def hermitian_defect(M):
    """Relative Frobenius distance of M from its Hermitian part."""
    M = as_cmatrix(M)
    return _symmetry_defect(M, M.conj().T)


def symmetric_defect(M):
    """Relative Frobenius distance of M from its symmetric part."""
    M = as_cmatrix(M)
    return _symmetry_defect(M, M.T)


def hermitianize(M, tol=VIEW_TOL):
    """Return (M + M^H)/2; a defect above tol raises (tol=None: no check)."""
    M = as_cmatrix(M)
    _require_square(M, "hermitianize")
    if tol is not None:
        defect = hermitian_defect(M)
        if defect > tol:
            raise StructureViolation(
                f"matrix is not Hermitian: relative defect {defect:.3e} > "
                f"{tol:.1e}", defect=defect)
    return 0.5 * (M + M.conj().T)


def symmetrize(M, tol=VIEW_TOL):
    """Return (M + M^T)/2; a defect above tol raises (tol=None: no check)."""
    M = as_cmatrix(M)
    _require_square(M, "symmetrize")
    if tol is not None:
        defect = symmetric_defect(M)
        if defect > tol:
            raise StructureViolation(
                f"matrix is not symmetric: relative defect {defect:.3e} > "
                f"{tol:.1e}", defect=defect)
    return 0.5 * (M + M.T)


class HermitianView:
    """A square matrix enforced to satisfy ``mat == mat^H`` exactly.

    The raw input is symmetrized on construction; the pre-symmetrization
    relative defect is kept in ``defect``.
    """

    __slots__ = ("mat", "defect")

    def __init__(self, M, tol=VIEW_TOL):
        self.defect = hermitian_defect(as_cmatrix(M))
        self.mat = hermitianize(M, tol)
        self.mat.setflags(write=False)

    @property
    def n(self):
        return self.mat.shape[0]


class SymmetricView:
    """A square matrix enforced to satisfy ``mat == mat^T`` exactly."""

    __slots__ = ("mat", "defect")

    def __init__(self, M, tol=VIEW_TOL):
        self.defect = symmetric_defect(as_cmatrix(M))
        self.mat = symmetrize(M, tol)
        self.mat.setflags(write=False)

    @property
    def n(self):
        return self.mat.shape[0]
