"""Structure-preserving doubling eigensolver for Bethe-Salpeter
eigenvalue problems H x = lambda x with H = [A B; -conj(B) -conj(A)]."""

from .cayley import ShiftSelection, SsfPair, build_ssf1, select_alpha, verify_ssf1
from .doubling import SolveReport, SolverConfig, run
from .extract import EigenResult, eigenpairs, residuals, spectral_density
from .oracle import compare, eig_direct, eig_pencil
from .problem import BseHamiltonian, GeneratorSpec, assemble_full, generate, load_mtx, save_mtx, validate

__version__ = "0.1.0"

__all__ = [
    "BseHamiltonian", "GeneratorSpec", "ShiftSelection", "SolveReport",
    "SolverConfig", "SsfPair", "EigenResult",
    "assemble_full", "build_ssf1", "compare", "eig_direct", "eig_pencil",
    "eigenpairs", "generate", "load_mtx", "residuals", "run", "save_mtx",
    "select_alpha", "spectral_density", "validate", "verify_ssf1",
    "__version__",
]
