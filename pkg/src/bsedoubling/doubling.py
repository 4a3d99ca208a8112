"""Two-recursion doubling iteration, monitoring, and the solve driver.

Each step maps (E, F) to

    E' = E (I - conj(F) F)^{-1} E
    F' = F + conj(E) F (I - conj(F) F)^{-1} E

squaring the pencil eigenvalues while preserving symplecticity.  The
driver watches ||E_k||_F for convergence, probes the singular values of
F for the sigma ~ 1 breakdown before every step, and dispatches to the
double-Cayley or three-recursion remedy when the probe trips.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import trirec
from .cayley import DEFAULT_RHO, PAIR_SYM_TOL, SsfPair, build_ssf1, select_alpha
from .dct import apply_dct
from .errors import (BreakdownDetected, DctFailed, NotConverged, RSingular,
                     ShiftHitsSpectrum, SingularMatrix, ZIllConditioned)
from .matkernel import hermitianize, solve_linear, symmetrize

REMEDY_POLICIES = ("auto", "dct-first", "trirec-only")

#: floor for the dual condition-number breakdown criterion.  The
#: sigma-ratio probe honors the configured breakdown tolerance, but
#: cond(I - conj(F) F) > 1/u with a loose u would reject benignly
#: conditioned steps, so the cond check never uses a u above this.
COND_PROBE_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    conv_tol: float = 1e-12
    max_iter: int = 60
    breakdown_tol: float = 1e-8   # the "u" of the sigma-ratio probe
    remedy: str = "auto"
    beta: float = 1.0             # double-Cayley scale, theta*beta > 0
    kappa: float = 2.0            # double-Cayley rate parameter, >= 2
    seed: int = 0                 # rng for kappa retries and random Z
    alpha: float | None = None    # user shift; None = auto
    rho: float = DEFAULT_RHO

    def __post_init__(self):
        if self.conv_tol <= 0:
            raise ValueError("conv_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.kappa < 2.0:
            raise ValueError("kappa must be >= 2")
        if self.remedy not in REMEDY_POLICIES:
            raise ValueError(f"unknown remedy policy {self.remedy!r}")


@dataclass(frozen=True)
class DoublingEvent:
    k: int
    kind: str    # Step | Breakdown | DctApplied | TriRecSwitch | ZRebase
    detail: str = ""


@dataclass
class SolveReport:
    F_limit: np.ndarray | None
    alpha: float
    iterations: int
    converged: bool
    regime: str                   # quadratic | linear | stagnated
    events: list
    E_norm_history: list
    warnings: list = field(default_factory=list)


def breakdown_probe(pair, u):
    """(ok, ratio) with ratio = min|sigma - 1| / max|sigma - 1| over sigma(F).

    A zero F has no breakdown risk: ok with ratio 1 by convention.
    """
    if np.linalg.norm(pair.F) == 0.0:
        return True, 1.0
    s = np.linalg.svd(pair.F, compute_uv=False)
    dist = np.abs(s - 1.0)
    dmax = dist.max()
    if dmax == 0.0:
        return False, 0.0
    ratio = float(dist.min() / dmax)
    return ratio >= u, ratio


def doubling_step(pair, u=1e-8):
    """One doubling transformation; raises BreakdownDetected when
    I - conj(F) F cannot be inverted reliably."""
    E, F = pair.E, pair.F
    n = E.shape[0]
    W = np.eye(n) - F.conj() @ F
    try:
        S = solve_linear(W, E)                 # (I - conj(F) F)^{-1} E
    except SingularMatrix as exc:
        raise BreakdownDetected(str(exc)) from exc
    u_cond = min(u, COND_PROBE_TOL)
    if np.linalg.cond(W) > 1.0 / u_cond:
        raise BreakdownDetected(
            f"I - conj(F) F condition exceeds {1.0 / u_cond:.1e}")
    E_new = E @ S
    F_new = F + E.conj() @ (F @ S)
    # ill-conditioned steps can leave sizable round-off asymmetry;
    # enforcement here is unconditional, the defect is observable upstream
    return SsfPair(E=hermitianize(E_new, None),
                   F=symmetrize(F_new, None),
                   alpha=pair.alpha,
                   k=pair.k + 1,
                   events=pair.events + [(pair.k + 1, "Step", "")])


def convergence_check(history, conv_tol):
    """Classify the tail of the ||E_k|| history.

    Returns (status, regime) with status in {converged, continue,
    stagnated}.  Quadratic: the last three log-norms at least 1.5x each
    other; linear: steady ratio < 1; stagnated: ratio >= 0.99 five times
    in a row.
    """
    if not history:
        raise ValueError("history must be nonempty")
    last = history[-1]
    regime = _classify_regime(history)
    if last <= conv_tol:
        return "converged", regime
    if regime == "stagnated":
        return "stagnated", regime
    return "continue", regime


def _classify_regime(history):
    ratios = [b / a for a, b in zip(history, history[1:]) if a > 0]
    # ||E_k|| typically grows for a few steps before collapsing, so a
    # plateau only counts as stagnation once the burn-in is well past
    if len(history) >= 10 and len(ratios) >= 6 and all(
            0.98 <= r <= 1.02 for r in ratios[-6:]):
        return "stagnated"
    # log-decrements over the decreasing tail: accelerating drops mean
    # quadratic convergence, roughly constant drops mean linear
    drops = []
    for a, b in zip(history, history[1:]):
        if 0 < b < a:
            drops.append(math.log10(a) - math.log10(b))
        else:
            drops = []
    if len(drops) >= 2 and drops[-1] >= 1.5 * drops[-2] and drops[-1] > 1.0:
        return "quadratic"
    if len(drops) >= 3:
        return "linear"
    return "quadratic" if len(history) < 6 else "linear"


def run(P, cfg=SolverConfig()):
    """Solve a problem end to end; returns (SolveReport, final state).

    The final state is the SsfPair (or TriState after a three-recursion
    switch) at termination.  Raises NotConverged, with the report
    attached, on max_iter or stagnation.
    """
    rng = np.random.default_rng(cfg.seed)
    events = []
    warnings = []

    sel = select_alpha(P, rho=cfg.rho, override=cfg.alpha)
    try:
        pair = build_ssf1(P, sel.alpha)
    except (ShiftHitsSpectrum, RSingular) as exc:
        if sel.mode == "user":
            sel = select_alpha(P, rho=cfg.rho)
            warnings.append(
                f"user shift failed ({exc}); retried with auto shift "
                f"{sel.alpha:.6g}")
            pair = build_ssf1(P, sel.alpha)
        else:
            raise

    history = []
    state = pair
    tri = None
    for _ in range(cfg.max_iter):
        if tri is None:
            history.append(float(np.linalg.norm(state.E)))
        else:
            history.append(float(np.linalg.norm(tri.P)))
        status, regime = convergence_check(history, cfg.conv_tol)
        if status == "converged":
            return _finish(P, state, tri, sel, history, events, warnings,
                           regime, cfg, converged=True)
        if status == "stagnated":
            report = _finish(P, state, tri, sel, history, events, warnings,
                             "stagnated", cfg, converged=False)
            raise NotConverged("iteration stagnated", report=report[0])

        if tri is not None:
            tri = _tri_advance(tri, cfg, rng, events)
            continue

        ok, ratio = breakdown_probe(state, cfg.breakdown_tol)
        if ok:
            try:
                state = doubling_step(state, cfg.breakdown_tol)
                events.append(DoublingEvent(state.k, "Step"))
                continue
            except BreakdownDetected as exc:
                events.append(DoublingEvent(state.k, "Breakdown", str(exc)))
        else:
            events.append(DoublingEvent(
                state.k, "Breakdown", f"sigma ratio {ratio:.3e}"))
        state, tri = _apply_remedy(state, cfg, rng, events)

    report = _finish(P, state, tri, sel, history, events, warnings,
                     _classify_regime(history), cfg, converged=False)
    raise NotConverged(f"no convergence in {cfg.max_iter} iterations",
                       report=report[0])


def _apply_remedy(state, cfg, rng, events):
    """Dispatch to DCT or the three-recursion switch per policy."""
    if cfg.remedy in ("auto", "dct-first"):
        try:
            new_pair = apply_dct(state, beta=cfg.beta, kappa=cfg.kappa,
                                 breakdown_tol=cfg.breakdown_tol, rng=rng)
            # the remedy must produce a pair that actually admits a step;
            # far into the iteration the double-Cayley map degenerates to
            # the identity, and accepting its output verbatim would loop
            # on the same stuck pair forever
            stepped = doubling_step(new_pair, cfg.breakdown_tol)
            events.append(DoublingEvent(state.k, "DctApplied",
                                        new_pair.events[-1][2]))
            events.append(DoublingEvent(stepped.k, "Step"))
            return stepped, None
        except BreakdownDetected as exc:
            if cfg.remedy == "dct-first":
                raise DctFailed(
                    f"rebuilt pair not steppable: {exc}") from exc
            events.append(DoublingEvent(
                state.k, "DctFailed", f"rebuilt pair not steppable: {exc}"))
        except DctFailed as exc:
            if cfg.remedy == "dct-first":
                raise
            events.append(DoublingEvent(state.k, "DctFailed", str(exc)))
    tri = switch_to_trirec(state, cfg, rng)
    events.append(DoublingEvent(state.k, "TriRecSwitch"))
    return state, tri


def switch_to_trirec(pair, cfg, rng):
    """Move a pair into the three-recursion parametrization, redrawing the
    random symmetric Z a bounded number of times."""
    scale = float(np.linalg.norm(pair.F)) or 1.0
    last = None
    for _ in range(trirec.Z_REDRAWS):
        Z = trirec.draw_z(pair.n, scale, rng)
        try:
            return trirec.init_three(pair, Z, u=cfg.breakdown_tol)
        except ZIllConditioned as exc:
            last = exc
    raise ZIllConditioned(f"all Z redraws failed: {last}")


def _tri_advance(tri, cfg, rng, events):
    from .errors import TriBreakdown

    try:
        return trirec.three_step(tri, u=cfg.breakdown_tol)
    except TriBreakdown:
        events.append(DoublingEvent(tri.j, "TriBreakdown"))
        scale = float(np.linalg.norm(tri.G)) or 1.0
        last = None
        for _ in range(trirec.Z_REDRAWS):
            Znew = trirec.draw_z(tri.n, scale, rng)
            try:
                rebased = trirec.rebase_z(tri, Znew, u=cfg.breakdown_tol)
                events.append(DoublingEvent(tri.j, "ZRebase"))
                return trirec.three_step(rebased, u=cfg.breakdown_tol)
            except (ZIllConditioned, TriBreakdown) as exc:
                last = exc
        raise ZIllConditioned(f"all Z rebases failed: {last}")


def riccati_refine(P, F, steps=2):
    """Newton refinement of a converged stable-subspace representative.

    F solves R(F) = -conj(B) + conj(A) F + F A - F B F = 0; each Newton
    correction solves the Sylvester equation
    (conj(A) - F B) dF + dF (A - B F) = -R(F).  When ||F|| is large the
    doubling recursions carry an absolute error floor that this polish
    removes; a step is kept only when it reduces ||R(F)||_F.
    """
    A, B = P.A.mat, P.B.mat

    def res(F):
        return -B.conj() + A.conj() @ F + F @ A - F @ B @ F

    R = res(F)
    for _ in range(steps):
        try:
            dF = scipy.linalg.solve_sylvester(A.conj() - F @ B, A - B @ F, -R)
        except Exception:
            break
        cand = symmetrize(F + dF, None)
        Rc = res(cand)
        if not np.all(np.isfinite(Rc)) or \
                np.linalg.norm(Rc) >= np.linalg.norm(R):
            break
        F, R = cand, Rc
    return F


def _finish(P, state, tri, sel, history, events, warnings, regime, cfg,
            converged):
    if tri is not None:
        if converged:
            F_limit = trirec.fold_back(tri, max(cfg.conv_tol, history[-1]))
        else:
            F_limit = None
        final = tri
        iterations = len(history) - 1
    else:
        F_limit = state.F if converged else None
        final = state
        iterations = state.k
    if F_limit is not None:
        F_limit = riccati_refine(P, F_limit)
    report = SolveReport(F_limit=F_limit,
                         alpha=sel.alpha,
                         iterations=iterations,
                         converged=converged,
                         regime=regime,
                         events=list(events),
                         E_norm_history=list(history),
                         warnings=list(warnings))
    if regime == "linear" and converged:
        report.warnings.append(
            "linear convergence regime detected (spectrum close to the "
            "imaginary axis)")
    return report, final
