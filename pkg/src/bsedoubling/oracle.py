"""Baseline reference eigensolvers for validation and accuracy comparison.

Two independent dense paths: a straight eigendecomposition of the
assembled H, and the generalized problem

    [A B; conj(B) conj(A)] x = lambda Gamma x

which is equivalent to H x = lambda x.  Neither enforces the quadruple
symmetry; that contrast against the structured solver is intentional.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence
from .extract import prec_compare
from .matkernel import dense_eig
from .problem import assemble_full, structure_matrix


@dataclass
class OracleResult:
    values: np.ndarray    # 2n
    vectors: np.ndarray   # 2n x 2n right eigenvectors
    method: str           # "direct" | "pencil"


def eig_direct(P):
    """Dense eig of the assembled 2n x 2n matrix."""
    H = assemble_full(P)
    w, V, _ = dense_eig(H)
    return OracleResult(values=w, vectors=V, method="direct")


def eig_pencil(P):
    """Generalized eigenvalues of ([A B; conj(B) conj(A)], Gamma)."""
    A, B = P.A.mat, P.B.mat
    K = np.block([[A, B], [B.conj(), A.conj()]])
    Gamma = structure_matrix(P.n, "Gamma")
    try:
        w, V = scipy.linalg.eig(K, Gamma, check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    return OracleResult(values=w, vectors=V, method="pencil")


def compare(result, oracle):
    """prec of a structured result against an oracle baseline.

    Oracle values are the denominators of the relative discrepancies.
    """
    return prec_compare(oracle.values, result.full_values)
