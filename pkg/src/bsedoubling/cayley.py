"""Shift selection and construction of the initial symplectic pair.

The Hamiltonian-like H is mapped by the Cayley transform
lambda -> (lambda + alpha)/(lambda - alpha) to a symplectic pair

    M = [E 0; F I],   L = [I conj(F); 0 conj(E)]

with E Hermitian and F complex symmetric.  The closed formulas used are

    T = (alpha*I - A) - B (alpha*I - conj(A))^{-1} conj(B)
    E = I - 2*alpha*T^{-1}
    F = -2*alpha*(alpha*I - conj(A))^{-1} conj(B) T^{-1}

which require only two factorizations and apply verbatim when rebuilding
a pair from a compressed Hamiltonian with a fresh shift.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositive, RSingular, ShiftHitsSpectrum, SingularMatrix
from .matkernel import hermitianize, solve_linear, symmetrize

#: safety factor turning the strict shift inequality into a margin
ALPHA_NUDGE = 1.0 + 1e-8

DEFAULT_RHO = math.sqrt(2.0)

#: relative symmetry tolerance applied when enforcing E/F structure
PAIR_SYM_TOL = 1e-8


@dataclass(frozen=True)
class ShiftSelection:
    alpha: float
    rho: float
    mode: str  # "auto" | "user"


@dataclass
class SsfPair:
    """Symplectic-pair state: E Hermitian, F symmetric, doubling count k.

    ``events`` accumulates (k, kind, detail) tuples describing steps and
    remedies applied while this state evolved.
    """

    E: np.ndarray
    F: np.ndarray
    alpha: float
    k: int = 0
    events: list = field(default_factory=list)

    @property
    def n(self):
        return self.E.shape[0]


def select_alpha(P, rho=DEFAULT_RHO, override=None):
    """Pick the Cayley shift.

    Auto mode returns rho*||H||_F + ||B||_F / (2*(rho-1)), nudged upward,
    which guarantees alpha*I - A positive definite, R and E nonsingular
    and ||F||_2 < 1.  A user override is passed through unvalidated.
    """
    if override is not None:
        if override <= 0:
            raise NonPositive(f"shift override must be positive, got {override}")
        return ShiftSelection(alpha=float(override), rho=rho, mode="user")
    if rho <= 1.0:
        raise NonPositive(f"rho must exceed 1, got {rho}")
    norm_a = np.linalg.norm(P.A.mat)
    norm_b = np.linalg.norm(P.B.mat)
    norm_h = math.sqrt(2.0 * (norm_a**2 + norm_b**2))
    alpha = rho * norm_h + norm_b / (2.0 * (rho - 1.0))
    return ShiftSelection(alpha=alpha * ALPHA_NUDGE, rho=rho, mode="auto")


def ssf1_parts(A, B, alpha):
    """Raw (E, F) for the pair built from blocks (A, B) with shift alpha.

    Raises ShiftHitsSpectrum when alpha*I - A is singular and RSingular
    when the Schur-complement matrix T is.
    """
    n = A.shape[0]
    I = np.eye(n)
    aminus = alpha * I - A
    try:
        U = solve_linear(aminus.conj(), B.conj())  # (aI - conj(A))^{-1} conj(B)
    except SingularMatrix as exc:
        raise ShiftHitsSpectrum(
            f"alpha = {alpha} makes alpha*I - A singular") from exc
    T = aminus - B @ U
    try:
        Tinv = solve_linear(T, I)
    except SingularMatrix as exc:
        raise RSingular(f"alpha = {alpha} makes R singular") from exc
    E = I - 2.0 * alpha * Tinv
    F = -2.0 * alpha * (U @ Tinv)
    return E, F


def build_ssf1(P, alpha):
    """Initial pair for a problem; E/F structure enforced after the fact."""
    E, F = ssf1_parts(P.A.mat, P.B.mat, alpha)
    return SsfPair(E=hermitianize(E, PAIR_SYM_TOL),
                   F=symmetrize(F, PAIR_SYM_TOL),
                   alpha=float(alpha), k=0)


def pair_matrices(pair):
    """Materialize the 2n x 2n pair (M, L) for diagnostics and tests."""
    n = pair.n
    I = np.eye(n)
    Z = np.zeros((n, n))
    M = np.block([[pair.E, Z], [pair.F, I]])
    L = np.block([[I, pair.F.conj()], [Z, pair.E.conj()]])
    return M, L


def verify_ssf1(pair):
    """Structural diagnostics: symplecticity and symmetry defects."""
    n = pair.n
    M, L = pair_matrices(pair)
    J = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    symplectic_defect = float(np.linalg.norm(M @ J @ M.T - L @ J @ L.T))
    herm = float(np.linalg.norm(pair.E - pair.E.conj().T))
    symm = float(np.linalg.norm(pair.F - pair.F.T))
    return {
        "symplectic_defect": symplectic_defect,
        "herm_defect": herm,
        "symm_defect": symm,
    }
