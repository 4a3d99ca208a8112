"""Three-recursion remedy for states where the double-Cayley escape fails.

A random complex symmetric Z reparametrizes the pair (E, F) into

    P = (I + conj(F) Z)^{-1} E
    G = (I + conj(F) Z)^{-1} conj(F)
    H = (F + Z) - conj(E) Z (I + conj(F) Z)^{-1} E

after which three coupled recursions replace the two-recursion doubling
step.  P tends to zero and H tends to Z - X2 X1^{-1}, so the converged
stable-subspace representative is H minus the accumulated Z.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotConvergedTri, SingularMatrix, TriBreakdown, ZIllConditioned
from .matkernel import solve_linear, symmetrize

#: bounded redraws of Z before the remedy reports failure
Z_REDRAWS = 5


@dataclass
class TriState:
    P: np.ndarray
    G: np.ndarray        # symmetric
    Htri: np.ndarray     # symmetric
    Z_total: np.ndarray  # accumulated symmetric shifts, for fold-back
    j: int = 0           # steps since the switch
    events: list = field(default_factory=list)

    @property
    def n(self):
        return self.P.shape[0]


def draw_z(n, scale, rng):
    """Random complex symmetric Z with Frobenius norm ``scale``."""
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Z = 0.5 * (raw + raw.T)
    nrm = np.linalg.norm(Z)
    return Z * (scale / nrm) if nrm > 0 else Z


def _guarded_solve(M, rhs, u, err):
    try:
        X = solve_linear(M, rhs)
    except SingularMatrix as exc:
        raise err(str(exc)) from exc
    if np.linalg.cond(M) > 1.0 / u:
        raise err(f"condition estimate exceeds {1.0 / u:.1e}")
    return X


def init_three(pair, Z, u=1e-8):
    """Transform an SSF-1 pair into the three-recursion state.

    The row operation that triangularizes the L-factor is
    [(I + conj(F) Z)^{-1}, 0; -conj(E) Z (I + conj(F) Z)^{-1}, I]; the
    conjugates are forced by requiring the transformed L-factor to read
    [I, G; 0, P^T] for complex symmetric F (push-through identities give
    the P^T link and the symmetry of G and H exactly).
    """
    E, F = pair.E, pair.F
    n = E.shape[0]
    W = np.eye(n) + F.conj() @ Z
    P = _guarded_solve(W, E, u, ZIllConditioned)
    G = _guarded_solve(W, F.conj(), u, ZIllConditioned)
    Htri = (F + Z) - E.conj() @ (Z @ P)
    return TriState(P=P,
                    G=symmetrize(G, None),
                    Htri=symmetrize(Htri, None),
                    Z_total=Z.copy(),
                    j=0,
                    events=list(pair.events))


def three_step(s, u=1e-8):
    """One doubling step in the three-recursion parametrization."""
    P, G, H = s.P, s.G, s.Htri
    n = P.shape[0]
    W = np.eye(n) - G @ H
    S = _guarded_solve(W, P, u, TriBreakdown)           # (I - G H)^{-1} P
    P_new = P @ S
    G_new = G + P @ _guarded_solve(W, G @ P.T, u, TriBreakdown)
    H_new = H + P.T @ (H @ S)
    return TriState(P=P_new,
                    G=symmetrize(G_new, None),
                    Htri=symmetrize(H_new, None),
                    Z_total=s.Z_total,
                    j=s.j + 1,
                    events=s.events)


def rebase_z(s, Znew, u=1e-8):
    """Shift the random basis by a fresh symmetric Znew mid-iteration.

    Leaves the encoded deflating subspace unchanged; the accumulated
    Z_total keeps fold-back consistent.
    """
    P, G, H = s.P, s.G, s.Htri
    n = P.shape[0]
    W = np.eye(n) + G @ Znew
    P_new = _guarded_solve(W, P, u, ZIllConditioned)
    G_new = _guarded_solve(W, G, u, ZIllConditioned)
    H_new = (H + Znew) - P.T @ (Znew @ P_new)
    return TriState(P=P_new,
                    G=symmetrize(G_new, None),
                    Htri=symmetrize(H_new, None),
                    Z_total=s.Z_total + Znew,
                    j=s.j,
                    events=s.events + [(s.j, "ZRebase", "")])


def fold_back(s, conv_tol=1e-12):
    """Converged stable-subspace representative F_limit = H - Z_total."""
    pnorm = float(np.linalg.norm(s.P))
    if pnorm > conv_tol:
        raise NotConvergedTri(
            f"||P||_F = {pnorm:.3e} still above {conv_tol:.1e}")
    return symmetrize(s.Htri - s.Z_total, None)
