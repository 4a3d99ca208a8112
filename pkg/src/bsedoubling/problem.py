"""Problem definition, validation, generators and file I/O.

A problem is the pair (A Hermitian, B complex symmetric) that implicitly
defines the 2n x 2n Hamiltonian-like matrix

    H = [ A        B      ]
        [ -conj(B) -conj(A) ].

Besides random generators, two hard-coded fixtures are provided: a 5x5
problem engineered so the doubling iteration hits a sigma(F) = 1
breakdown after five steps with shift 1, and a 7x7 block problem with a
defective triple eigenvalue.
"""

from dataclasses import dataclass

import numpy as np

from . import mmio
from .errors import DimensionMismatch, StructureViolation, UnknownKind
from .matkernel import HermitianView, SymmetricView, as_cmatrix

GENERATOR_KINDS = ("random-complex", "random-real", "defective-fixture",
                   "breakdown-fixture")


@dataclass(frozen=True)
class BseHamiltonian:
    """The (A, B) pair defining H; both blocks structurally enforced."""

    A: HermitianView
    B: SymmetricView

    @property
    def n(self):
        return self.A.n


@dataclass(frozen=True)
class GeneratorSpec:
    """Reproducible description of a generated problem.

    ``gap`` shifts the diagonal of A by a positive constant, pushing the
    spectrum of H away from the imaginary axis (0 = no shift).  Fixture
    kinds ignore n, seed, scale and gap.
    """

    n: int
    kind: str
    seed: int = 0
    scale: float = 1.0
    gap: float = 0.0


def validate(A, B, tol=1e-12):
    """Check shapes and symmetry of (A, B) and return the enforced problem.

    The measured pre-enforcement defects are available on the returned
    views (``P.A.defect``, ``P.B.defect``).
    """
    A = as_cmatrix(A)
    B = as_cmatrix(B)
    if A.shape[0] != A.shape[1] or B.shape[0] != B.shape[1]:
        raise DimensionMismatch("A and B must be square")
    if A.shape != B.shape:
        raise DimensionMismatch(
            f"A has order {A.shape[0]} but B has order {B.shape[0]}")
    try:
        return BseHamiltonian(A=HermitianView(A, tol), B=SymmetricView(B, tol))
    except StructureViolation as exc:
        raise StructureViolation(
            f"problem blocks violate required symmetry: {exc}",
            defect=exc.defect) from exc


def assemble_full(P):
    """Materialize the 2n x 2n matrix H from the stored blocks."""
    A, B = P.A.mat, P.B.mat
    return np.block([[A, B], [-B.conj(), -A.conj()]])


def structure_matrix(n, which):
    """One of the three 2n x 2n structure matrices J, Gamma, Pi."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    if which == "J":
        return np.block([[Z, I], [-I, Z]])
    if which == "Gamma":
        return np.block([[I, Z], [Z, -I]])
    if which == "Pi":
        return np.block([[Z, I], [I, Z]])
    raise UnknownKind(f"unknown structure matrix {which!r}")


def generate(spec):
    """Build a problem from a GeneratorSpec, deterministic in the seed."""
    if spec.kind == "breakdown-fixture":
        return validate(_BREAKDOWN_A, _BREAKDOWN_B, tol=1e-10)
    if spec.kind == "defective-fixture":
        return validate(_defective_A(), _defective_B(), tol=1e-10)
    if spec.kind not in ("random-complex", "random-real"):
        raise UnknownKind(f"unknown generator kind {spec.kind!r}")
    if spec.n < 1:
        raise DimensionMismatch("n must be >= 1")
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.kind == "random-complex":
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        G = rng.standard_normal((n, n)).astype(complex)
        K = rng.standard_normal((n, n)).astype(complex)
    A = spec.scale * 0.5 * (G + G.conj().T)
    B = spec.scale * 0.5 * (K + K.T)
    if spec.gap:
        # the smallest diagonal shift of A making [A B; conj(B) conj(A)]
        # definite with margin `gap`; the spectrum of H is then real with
        # |lambda| bounded away from zero by about that margin
        K2 = np.block([[A, B], [B.conj(), A.conj()]])
        lam_min = float(np.linalg.eigvalsh(K2).min())
        A = A + (spec.gap + max(0.0, -lam_min)) * np.eye(n)
    return validate(A, B, tol=1e-10)


def save_mtx(P, path_a, path_b, comments=()):
    """Write A and B as two complex general Matrix Market array files."""
    mmio.save_matrix(path_a, P.A.mat, comments=comments)
    mmio.save_matrix(path_b, P.B.mat, comments=comments)


def load_mtx(path_a, path_b, tol=1e-12):
    """Load and validate a problem from two Matrix Market files."""
    A, _ = mmio.load_matrix(path_a)
    B, _ = mmio.load_matrix(path_b)
    return validate(A, B, tol=tol)


# --- fixture data -----------------------------------------------------

# 5x5 pair whose doubling iterates, started with shift 1, drive the
# singular values of F to {1.9376 (x4), 1} at step five: the next step
# would invert a numerically singular I - conj(F) F.
_BREAKDOWN_A = np.array([
    [0.6607 + 0.0000j, 0.1299 - 0.1365j, 0.0632 - 0.0086j, -0.0341 - 0.0517j, -0.0628 - 0.0044j],
    [0.1299 + 0.1365j, 0.2441 + 0.0000j, -0.1293 - 0.1035j, -0.0363 + 0.1567j, 0.1042 + 0.1260j],
    [0.0632 + 0.0086j, -0.1293 + 0.1035j, 0.6772 + 0.0000j, 0.0236 + 0.0491j, 0.0542 + 0.0113j],
    [-0.0341 + 0.0517j, -0.0363 - 0.1567j, 0.0236 - 0.0491j, 0.6804 + 0.0000j, -0.0326 + 0.0427j],
    [-0.0628 + 0.0044j, 0.1042 - 0.1260j, 0.0542 - 0.0113j, -0.0326 - 0.0427j, 0.6787 + 0.0000j],
])

_BREAKDOWN_B = np.array([
    [-0.5704 + 0.2984j, -0.4605 - 0.0324j, 0.1693 - 0.3006j, -0.1181 + 0.4597j, 0.2109 + 0.0879j],
    [-0.4605 - 0.0324j, 0.0573 - 0.1759j, -0.1520 + 0.0419j, -0.1526 - 0.0408j, 0.1452 - 0.2288j],
    [0.1693 - 0.3006j, -0.1520 + 0.0419j, 0.4908 - 0.7534j, 0.1880 - 0.0406j, -0.1733 - 0.1743j],
    [-0.1181 + 0.4597j, -0.1526 - 0.0408j, 0.1880 - 0.0406j, -0.1783 - 0.6552j, -0.5212 + 0.1871j],
    [0.2109 + 0.0879j, 0.1452 - 0.2288j, -0.1733 - 0.1743j, -0.5212 + 0.1871j, -0.2548 - 0.7032j],
])


def _defective_A():
    # 7x7 block-diagonal A = diag(A1, A2, A3); the assembled H has the
    # eigenvalue pair +-4.1204e-3 with algebraic multiplicity 3 and
    # geometric multiplicity 1.
    A1 = np.array([
        [2.6361, 1.0378e1, 5.0751e-2],
        [1.0378e1, 5.2431e-2, -4.6067e-1],
        [5.0751e-2, -4.6067e-1, -1.6892e-2],
    ], dtype=complex)
    A2 = np.array([
        [-4.0549e-1, -3.7710 + 2.7569j],
        [-3.7710 - 2.7569j, -4.0549e-1],
    ])
    A3 = np.array([
        [3.6378e-1, 2.7293e-1 + 3.5908j],
        [2.7293e-1 - 3.5908j, 3.6378e-1],
    ])
    out = np.zeros((7, 7), dtype=complex)
    out[:3, :3] = A1
    out[3:5, 3:5] = A2
    out[5:, 5:] = A3
    return out


def _defective_B():
    B1 = np.array([
        [-2.6361, -1.0375e1, -5.1181e-2],
        [-1.0375e1, -5.3457e-2, 5.0988e-1],
        [-5.1181e-2, 5.0988e-1, 4.2022e-3],
    ], dtype=complex)
    B2 = np.array([
        [1.2343e-1 - 3.8788e-1j, 3.7566 - 2.7464j],
        [3.7566 - 2.7464j, 4.0704e-1 + 6.0156e-5j],
    ])
    B3 = np.array([
        [3.6148e-1 - 5.5211e-2j, -2.7152e-1 - 3.5722j],
        [-2.7152e-1 - 3.5722j, -3.6567e-1 + 5.9265e-5j],
    ])
    out = np.zeros((7, 7), dtype=complex)
    out[:3, :3] = B1
    out[3:5, 3:5] = B2
    out[5:, 5:] = B3
    return out
