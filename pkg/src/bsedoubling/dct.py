"""Double-Cayley escape from sigma(F) = 1 breakdowns.

The current pair is mapped back to a Hamiltonian-like block pair
(Ahat, Bhat) through an inverse Cayley transform with pole theta in
{-1, +1}, then a fresh Cayley transform with shift gamma rebuilds a
symplectic pair whose F stays away from the breakdown set.  gamma is
derived from a rate parameter kappa >= 2 through

    varpi = -kappa**(-2**k0)        (computed in log space)
    gamma = beta * (1 - varpi*theta) / (theta + varpi)

which is numerically stable for large doubling counts k0 where
kappa**(2**k0) overflows.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cayley import PAIR_SYM_TOL, SsfPair, ssf1_parts
from .errors import DctFailed, GammaHitsSpectrum, RSingular, ShiftHitsSpectrum, SingularMatrix, ZSingular
from .matkernel import hermitianize, solve_linear, symmetrize

#: relative distance below which theta is considered to hit lambda(E)
THETA_MIN_DIST = 1e-12

#: bounded retries drawing fresh kappa values before giving up
KAPPA_RETRIES = 3
KAPPA_RANGE = (2.0, 10.0)

#: floor for the post-rebuild probe; a loose driver tolerance must not
#: accept a rebuilt pair that is still effectively at the breakdown set
POST_PROBE_TOL = 1e-8


@dataclass(frozen=True)
class DctParams:
    theta: int        # -1 or +1
    beta: float       # theta*beta > 0
    kappa: float      # >= 2
    k0: int           # doubling count at which the remedy fires

    @property
    def varpi(self):
        # -kappa**(-2**k0); underflows gracefully to -0.0
        try:
            return -math.exp(-(2.0**self.k0) * math.log(self.kappa))
        except OverflowError:
            return -0.0

    @property
    def gamma(self):
        w = self.varpi
        return self.beta * (1.0 - w * self.theta) / (self.theta + w)


@dataclass(frozen=True)
class CompressedHamiltonian:
    Ahat: np.ndarray  # Hermitian
    Bhat: np.ndarray  # symmetric
    params: DctParams


def choose_theta(E):
    """Pick theta in {+1, -1} farthest from the (real) spectrum of E.

    E Hermitian means min sigma(theta*I - E) equals the distance of theta
    to lambda(E); one symmetric eigendecomposition gives both distances.
    Returns None when both candidates are within roundoff of lambda(E).
    """
    evals = np.linalg.eigvalsh(0.5 * (E + E.conj().T))
    d_plus = float(np.min(np.abs(1.0 - evals)))
    d_minus = float(np.min(np.abs(-1.0 - evals)))
    floor = THETA_MIN_DIST * max(np.linalg.norm(E), 1e-300)
    best, dist = (1, d_plus) if d_plus >= d_minus else (-1, d_minus)
    if dist < floor:
        return None
    return best


def compress(pair, params):
    """Map the pair back to Hamiltonian-like blocks (Ahat, Bhat)."""
    E, F = pair.E, pair.F
    n = E.shape[0]
    I = np.eye(n)
    th, beta = params.theta, params.beta
    try:
        W = solve_linear(th * E.conj() - I, F)        # (th*conj(E) - I)^{-1} F
        Z = th * I - E + th * (F.conj() @ W)
        Zinv = solve_linear(Z, I)
    except SingularMatrix as exc:
        raise ZSingular(
            f"theta = {th} numerically hits the spectrum of E") from exc
    Ahat = beta * th * I - 2.0 * beta * Zinv
    try:
        V = solve_linear(E.conj() - th * I, np.eye(n))
    except SingularMatrix as exc:
        raise ZSingular(
            f"theta = {th} numerically hits the spectrum of E") from exc
    Bhat = (beta * I - th * Ahat) @ F.conj() @ V
    return CompressedHamiltonian(
        Ahat=hermitianize(Ahat, PAIR_SYM_TOL),
        Bhat=symmetrize(Bhat, PAIR_SYM_TOL),
        params=params)


def rebuild(C, gamma):
    """Fresh Cayley pair from the compressed blocks with shift gamma.

    The doubling count resumes at k0 + 1.
    """
    try:
        E, F = ssf1_parts(C.Ahat, C.Bhat, gamma)
    except (ShiftHitsSpectrum, RSingular) as exc:
        raise GammaHitsSpectrum(
            f"gamma = {gamma} unusable for the compressed pair: {exc}") from exc
    return SsfPair(E=hermitianize(E, PAIR_SYM_TOL),
                   F=symmetrize(F, PAIR_SYM_TOL),
                   alpha=gamma, k=C.params.k0 + 1)


def spectral_map(lam, alpha, params):
    """Scalar image nu of an eigenvalue lambda of H under the full remedy.

    nu = theta * (varpi + delta**2**k0) / (1 + varpi * delta**2**k0) with
    delta = (lambda + alpha)/(lambda - alpha).
    """
    delta = (lam + alpha) / (lam - alpha)
    d = delta ** (2.0**params.k0)
    w = params.varpi
    return params.theta * (w + d) / (1.0 + w * d)


def apply_dct(pair, beta=1.0, kappa=2.0, breakdown_tol=1e-8, rng=None):
    """Full remedy: choose theta, compress, rebuild, retrying kappa.

    The rebuilt pair must pass the singular-value breakdown probe; up to
    KAPPA_RETRIES fresh random kappa draws are attempted before DctFailed
    is raised (the driver then falls back to the three-recursion form).
    """
    from .doubling import breakdown_probe  # cycle-avoiding local import

    theta = choose_theta(pair.E)
    if theta is None:
        raise DctFailed("both theta = +1 and theta = -1 hit lambda(E)")
    if rng is None:
        rng = np.random.default_rng(0)
    kappas = [float(kappa)] + [
        float(rng.uniform(*KAPPA_RANGE)) for _ in range(KAPPA_RETRIES)]
    compressed = None
    last_error = None
    for kap in kappas:
        params = DctParams(theta=theta, beta=theta * abs(beta),
                           kappa=kap, k0=pair.k)
        try:
            if compressed is None or compressed.params.theta != theta:
                compressed = compress(pair, params)
            rebuilt = rebuild(
                CompressedHamiltonian(compressed.Ahat, compressed.Bhat, params),
                params.gamma)
        except (ZSingular, GammaHitsSpectrum) as exc:
            last_error = exc
            continue
        ok, ratio = breakdown_probe(rebuilt, min(breakdown_tol, POST_PROBE_TOL))
        if ok:
            rebuilt.events = pair.events + [
                (pair.k, "DctApplied",
                 f"theta={theta} kappa={kap:.4g} gamma={params.gamma:.6g}")]
            return rebuilt
        last_error = DctFailed(
            f"rebuilt pair still near breakdown (ratio {ratio:.3e})")
    raise DctFailed(f"all kappa retries failed: {last_error}")
