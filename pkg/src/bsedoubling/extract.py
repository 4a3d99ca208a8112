"""Eigen-extraction from the converged subspace representative.

With F the converged representative of the stable invariant subspace,
the n x n reduced matrix

    Hr = [I, -F^H] H [I; -F] (I + F^H F)^{-1}

carries the stable sub-spectrum.  The unstable half is mirrored
analytically (lambda -> -conj(lambda), x -> Pi conj(x)), so the returned
2n eigenvalues are exactly closed under the quadruple symmetry rather
than recomputed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MatchFailure, MissingDipoles
from .matkernel import dense_eig, solve_linear
from .problem import assemble_full, structure_matrix


@dataclass
class EigenResult:
    stable_values: np.ndarray     # n values, Re <= 0 half
    full_values: np.ndarray       # 2n values, exact quadruple closure
    right_vectors: np.ndarray     # 2n x 2n, columns n..2n-1 = Pi conj of 0..n-1
    pairing: np.ndarray           # index map j -> m with lam[m] = conj(lam[j])
    warnings: list

    @property
    def n(self):
        return self.stable_values.shape[0]


@dataclass
class ResidualReport:
    decomposition_residual: float
    rayleigh_residual: float
    prec: float | None


@dataclass
class SpectralDensity:
    grid: np.ndarray
    values: np.ndarray
    broadening: float
    kind: str                     # "dos" | "absorption"


def reduced_matrix(P, F):
    """The n x n matrix whose spectrum approximates the stable half."""
    A, B = P.A.mat, P.B.mat
    n = P.n
    Fh = F.conj().T
    # [I, -F^H] H [I; -F] written out on the blocks of H
    core = (A + Fh @ B.conj()) - (B + Fh @ A.conj()) @ F
    gram = np.eye(n) + Fh @ F
    return core @ solve_linear(gram, np.eye(n))


def eigenpairs(P, F):
    """Full structured eigen-decomposition from the converged F.

    The subspace spanned by [I; -F] is compressed in an orthonormal
    basis (QR) rather than through (I + F^H F)^{-1}: same spectrum, but
    no ill-conditioned solve when ||F|| is large.
    """
    warnings = []
    n = P.n
    H = assemble_full(P)
    Q, _ = np.linalg.qr(np.vstack([np.eye(n), -F]))
    w, V, _ = dense_eig(Q.conj().T @ (H @ Q))
    X = Q @ V
    X = X / np.linalg.norm(X, axis=0, keepdims=True)
    Pi = structure_matrix(n, "Pi")
    if np.mean(w.real) > 0:
        # F converged to the unstable subspace; mirror the labeling
        w = -w.conj()
        X = Pi @ X.conj()
        warnings.append("extracted values had positive mean real part; "
                        "stable/unstable labeling flipped")
    full = np.concatenate([w, -w.conj()])
    vectors = np.hstack([X, Pi @ X.conj()])
    pairing = _conjugate_pairing(full)
    return EigenResult(stable_values=w, full_values=full,
                       right_vectors=vectors, pairing=pairing,
                       warnings=warnings)


def _conjugate_pairing(values):
    """Greedy index map j -> m minimizing |values[m] - conj(values[j])|."""
    m = values.shape[0]
    pairing = np.empty(m, dtype=int)
    taken = np.zeros(m, dtype=bool)
    order = np.argsort(-np.abs(values.imag))  # pair hardest cases first
    for j in order:
        d = np.abs(values - values[j].conj())
        d[taken] = np.inf
        best = int(np.argmin(d))
        pairing[j] = best
        taken[best] = True
    return pairing


def left_vectors(result):
    """Left eigenvectors: y_j = Gamma x_m(j) with lam[m(j)] = conj(lam[j]),
    scaled so y_j^H x_j = 1."""
    n = result.n
    Gamma = structure_matrix(n, "Gamma")
    Y = Gamma @ result.right_vectors[:, result.pairing]
    for j in range(2 * n):
        s = Y[:, j].conj() @ result.right_vectors[:, j]
        if abs(s) > 0:
            Y[:, j] = Y[:, j] / s.conj()
    return Y


def residuals(P, result, reference=None):
    """Residual metrics of a structured eigen-decomposition.

    The relative accuracy ``prec`` against a reference eigenvalue list is
    computed only when one is supplied (greedy nearest matching).
    """
    H = assemble_full(P)
    norm_h = np.linalg.norm(H)
    X = result.right_vectors
    D = np.diag(result.full_values)
    try:
        recon = X @ D @ solve_linear(X, np.eye(2 * P.n))
        decomposition = float(np.linalg.norm(H - recon) / norm_h)
    except Exception:
        decomposition = np.inf
    Y = left_vectors(result)
    rayleigh = float(np.linalg.norm(Y.conj().T @ H @ X - D) / norm_h)
    prec = None
    if reference is not None:
        prec = prec_compare(np.asarray(reference), result.full_values)
    return ResidualReport(decomposition_residual=decomposition,
                          rayleigh_residual=rayleigh,
                          prec=prec)


def prec_compare(reference, computed):
    """log10 of the worst matched relative eigenvalue discrepancy.

    Reference values are the denominators.  Identical multisets give
    -inf.  Greedy nearest-neighbor matching, largest magnitudes first.
    """
    reference = np.asarray(reference, dtype=complex)
    computed = np.asarray(computed, dtype=complex)
    if reference.shape != computed.shape:
        raise MatchFailure(
            f"cannot match {reference.shape[0]} reference against "
            f"{computed.shape[0]} computed eigenvalues")
    taken = np.zeros(computed.shape[0], dtype=bool)
    worst = 0.0
    for j in np.argsort(-np.abs(reference)):
        d = np.abs(computed - reference[j])
        d[taken] = np.inf
        m = int(np.argmin(d))
        taken[m] = True
        denom = abs(reference[j])
        if denom > 0:
            worst = max(worst, d[m] / denom)
        elif d[m] > 0:
            worst = np.inf
    if worst == 0.0:
        return -np.inf
    return float(np.log10(worst))


def spectral_density(result, grid, broadening, kind="dos", dipoles=None):
    """Gaussian-broadened eigenvalue densities on a real frequency grid.

    dos: (1/2n) sum of unit-area Gaussians at Re(lambda_j) over all 2n
    values.  absorption: dipole-weighted sum over the positive half, with
    weights (d_r^H x_j)(y_j^H d_l)/(y_j^H x_j).
    """
    if broadening <= 0:
        raise ValueError("broadening must be positive")
    grid = np.asarray(grid, dtype=float)
    norm = 1.0 / (broadening * np.sqrt(2.0 * np.pi))
    values = np.zeros_like(grid)
    if kind == "dos":
        for lam in result.full_values:
            values += norm * np.exp(
                -0.5 * ((grid - lam.real) / broadening) ** 2)
        values /= result.full_values.shape[0]
    elif kind == "absorption":
        if dipoles is None:
            raise MissingDipoles("absorption spectra require dipole vectors")
        d_r, d_l = (np.asarray(d, dtype=complex) for d in dipoles)
        Y = left_vectors(result)
        X = result.right_vectors
        for j, lam in enumerate(result.full_values):
            if lam.real <= 0:
                continue
            y, x = Y[:, j], X[:, j]
            denom = y.conj() @ x
            if denom == 0:
                continue
            weight = (d_r.conj() @ x) * (y.conj() @ d_l) / denom
            values += weight.real * norm * np.exp(
                -0.5 * ((grid - lam.real) / broadening) ** 2)
    else:
        raise ValueError(f"unknown spectral kind {kind!r}")
    return SpectralDensity(grid=grid, values=values,
                           broadening=float(broadening), kind=kind)


def save_density_csv(path, density):
    """CSV serialization: header omega,value at full double precision."""
    with open(path, "w") as fh:
        fh.write("omega,value\n")
        for w, v in zip(density.grid, density.values):
            fh.write(f"{w:.17g},{v:.17g}\n")
