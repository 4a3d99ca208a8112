import numpy as np
import pytest

from bsedoubling.errors import (DimensionMismatch, NonFinite, SingularMatrix,
                                StructureViolation)
from bsedoubling.matkernel import (HermitianView, SymmetricView, as_cmatrix,
                                   cond_estimate, dense_eig, hermitian_defect,
                                   hermitianize, singular_values, solve_linear,
                                   symmetric_defect, symmetrize)


def test_as_cmatrix_rejects_nonfinite():
    with pytest.raises(NonFinite):
        as_cmatrix(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(NonFinite):
        as_cmatrix(np.array([[1.0, 1.0 + 1j * np.inf], [0.0, 1.0]]))


def test_as_cmatrix_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        as_cmatrix(np.ones(3))
    with pytest.raises(DimensionMismatch):
        as_cmatrix(np.ones((2, 0)))


def test_as_cmatrix_accepts_noncontiguous():
    M = np.arange(16, dtype=float).reshape(4, 4)[::2, ::2]
    out = as_cmatrix(M)
    assert out.shape == (2, 2)


def test_solve_linear_roundtrip():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    X = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    sol = solve_linear(M, M @ X)
    assert np.allclose(sol, X, atol=1e-10)


def test_solve_linear_singular():
    M = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    with pytest.raises(SingularMatrix) as exc:
        solve_linear(M, np.eye(2))
    assert exc.value.rcond >= 0.0


def test_solve_linear_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear(np.eye(3), np.eye(2))


def test_singular_values_ordering():
    s = singular_values(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(s, [3.0, 2.0, 1.0])


def test_dense_eig_left_right():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    w, V, W = dense_eig(M)
    assert np.linalg.norm(M @ V - V @ np.diag(w)) < 1e-10
    assert np.linalg.norm(W.conj().T @ M - np.diag(w) @ W.conj().T) < 1e-10


def test_cond_estimate():
    assert cond_estimate(np.eye(4)) == pytest.approx(1.0)
    assert cond_estimate(np.diag([1.0, 0.0])) == np.inf


def test_defects_and_enforcement():
    rng = np.random.default_rng(2)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = 0.5 * (G + G.conj().T)
    S = 0.5 * (G + G.T)
    assert hermitian_defect(H) < 1e-15
    assert symmetric_defect(S) < 1e-15
    assert hermitian_defect(G) > 1e-3
    out = hermitianize(H + 1e-14 * G)
    assert np.linalg.norm(out - out.conj().T) == 0.0
    with pytest.raises(StructureViolation):
        hermitianize(G)
    with pytest.raises(StructureViolation):
        symmetrize(G)


def test_enforcement_without_check():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    out = symmetrize(G, None)       # arbitrarily asymmetric, no raise
    assert np.linalg.norm(out - out.T) == 0.0
    out = hermitianize(G, None)
    assert np.linalg.norm(out - out.conj().T) == 0.0


def test_views_record_defect():
    rng = np.random.default_rng(4)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    H = 0.5 * (G + G.conj().T) + 1e-13 * G
    view = HermitianView(H, tol=1e-10)
    assert view.defect > 0
    assert np.linalg.norm(view.mat - view.mat.conj().T) == 0.0
    assert not view.mat.flags.writeable
    S = 0.5 * (G + G.T)
    assert SymmetricView(S).n == 4
