import numpy as np
import pytest

from bsedoubling import trirec
from bsedoubling.cayley import build_ssf1, select_alpha
from bsedoubling.doubling import doubling_step
from bsedoubling.errors import NotConvergedTri, ZIllConditioned
from bsedoubling.problem import GeneratorSpec, generate, validate


def _gentle(n=8, seed=0):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = 0.5 * (G + G.conj().T)
    B = np.eye(n) + 0.3 * 0.5 * (K + K.T)
    K2 = np.block([[A, B], [B.conj(), A.conj()]])
    A = A + (1.0 + max(0.0, -float(np.linalg.eigvalsh(K2).min()))) * np.eye(n)
    return validate(A, B, tol=1e-10)


def test_draw_z_symmetric_with_norm():
    rng = np.random.default_rng(0)
    Z = trirec.draw_z(6, 3.5, rng)
    assert np.linalg.norm(Z - Z.T) == 0.0
    assert np.linalg.norm(Z) == pytest.approx(3.5)


def test_init_three_structure():
    P = _gentle()
    pair = build_ssf1(P, select_alpha(P).alpha)
    Z = trirec.draw_z(pair.n, np.linalg.norm(pair.F), np.random.default_rng(1))
    tri = trirec.init_three(pair, Z)
    assert np.linalg.norm(tri.G - tri.G.T) == 0.0
    assert np.linalg.norm(tri.Htri - tri.Htri.T) == 0.0
    assert tri.j == 0


def test_three_recursion_matches_doubling():
    """At convergence, fold_back must reproduce the plain doubling limit."""
    P = _gentle(n=16, seed=2)
    pair = build_ssf1(P, select_alpha(P).alpha)
    Z = trirec.draw_z(pair.n, np.linalg.norm(pair.F), np.random.default_rng(2))
    tri = trirec.init_three(pair, Z)
    for _ in range(30):
        tri = trirec.three_step(tri)
        if np.linalg.norm(tri.P) < 1e-13:
            break
    p = pair
    for _ in range(30):
        p = doubling_step(p)
        if np.linalg.norm(p.E) < 1e-13:
            break
    fold = trirec.fold_back(tri, 1e-12)
    rel = np.linalg.norm(fold - p.F) / np.linalg.norm(p.F)
    assert rel < 1e-10, rel


def test_fold_back_requires_convergence():
    P = _gentle(n=6, seed=3)
    pair = build_ssf1(P, select_alpha(P).alpha)
    Z = trirec.draw_z(pair.n, np.linalg.norm(pair.F), np.random.default_rng(3))
    tri = trirec.init_three(pair, Z)
    with pytest.raises(NotConvergedTri):
        trirec.fold_back(tri, 1e-12)


def test_rebase_preserves_limit():
    P = _gentle(n=8, seed=1)
    pair = build_ssf1(P, select_alpha(P).alpha)
    rng = np.random.default_rng(4)
    Z = trirec.draw_z(pair.n, np.linalg.norm(pair.F), rng)
    tri = trirec.init_three(pair, Z)
    for j in range(30):
        if j == 3:
            tri = trirec.rebase_z(
                tri, trirec.draw_z(tri.n, np.linalg.norm(tri.G), rng))
        tri = trirec.three_step(tri)
        if np.linalg.norm(tri.P) < 1e-13:
            break
    F_fold = trirec.fold_back(tri, 1e-12)
    # reference: plain doubling limit
    p = pair
    for _ in range(30):
        p = doubling_step(p)
        if np.linalg.norm(p.E) < 1e-13:
            break
    rel = np.linalg.norm(F_fold - p.F) / np.linalg.norm(p.F)
    assert rel < 1e-10, rel
    assert any(e[1] == "ZRebase" for e in tri.events)


def test_ill_conditioned_z_raises():
    P = _gentle(n=4, seed=5)
    pair = build_ssf1(P, select_alpha(P).alpha)
    # engineer I + conj(F) Z = diag(1, 1, 1, 1e-12): far past the guard
    W_target = np.diag([1.0, 1.0, 1.0, 1e-12]).astype(complex)
    Z = np.linalg.solve(pair.F.conj(), W_target - np.eye(4))
    with pytest.raises(ZIllConditioned):
        trirec.init_three(pair, Z)
