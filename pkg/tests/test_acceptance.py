"""Acceptance gate: one test (and one pass/fail line) per criterion A1-A9.

Criteria that cannot be met with the precision-limited hard-coded
fixture data are asserted at their stated tolerances anyway; the assert
message lists every failing clause so a red line documents exactly what
fell short and by how much.
"""

import time

import numpy as np
import scipy.linalg

from bsedoubling import oracle, trirec
from bsedoubling.cayley import build_ssf1, pair_matrices, select_alpha
from bsedoubling.dct import DctParams, compress, spectral_map
from bsedoubling.doubling import (SolverConfig, breakdown_probe,
                                  doubling_step, run)
from bsedoubling.extract import (eigenpairs, prec_compare, reduced_matrix,
                                 residuals, spectral_density)
from bsedoubling.problem import GeneratorSpec, generate, validate


def _greedy_rel(reference, computed):
    taken = np.zeros(len(computed), dtype=bool)
    worst = 0.0
    for j in np.argsort(-np.abs(reference)):
        d = np.abs(computed - reference[j])
        d[taken] = np.inf
        m = int(np.argmin(d))
        taken[m] = True
        worst = max(worst, d[m] / max(abs(reference[j]), 1e-300))
    return worst


def test_A1_breakdown_reproduction():
    t0 = time.perf_counter()
    failures = []
    P = generate(GeneratorSpec(n=5, kind="breakdown-fixture"))

    pair = build_ssf1(P, 1.0)
    for _ in range(5):
        pair = doubling_step(pair)
    sigma = np.sort(np.linalg.svd(pair.F, compute_uv=False))[::-1]
    target = np.array([1.9376, 1.9376, 1.9376, 1.9376, 1.0])
    dev = np.max(np.abs(sigma - target))
    if dev > 1e-3:
        failures.append(
            f"sigma(F_5) deviates {dev:.3e} > 1e-3 from published values "
            "(fixture matrices are printed to 4-5 significant digits; the "
            "truncation is amplified through five doubling steps)")

    ok, ratio = breakdown_probe(pair, 5e-3)
    if ok:
        failures.append(f"breakdown probe did not report ill (ratio {ratio:.3e})")

    try:
        report, _ = run(P, SolverConfig(alpha=1.0, breakdown_tol=5e-3))
        converged = report.converged
    except Exception as exc:
        report = getattr(exc, "report", None)
        converged = False
    kinds = [e.kind for e in report.events] if report is not None else []
    if "DctApplied" not in kinds:
        failures.append("no DctApplied event in the solve")
    if not converged:
        failures.append(
            "solve did not converge: the fixture H (as printed) carries four "
            "eigenvalues exactly on the imaginary axis, whose unit-modulus "
            "pencil images no structure-preserving remedy can move off the "
            "unit circle; ||E_k|| therefore cannot decay")
    else:
        rr = residuals(P, eigenpairs(P, report.F_limit))
        if rr.decomposition_residual > 1e-8:
            failures.append(
                f"residual {rr.decomposition_residual:.3e} > 1e-8")

    elapsed = time.perf_counter() - t0
    if elapsed >= 1.0:
        failures.append(f"runtime {elapsed:.2f}s >= 1s")
    assert not failures, "; ".join(failures)


def test_A2_defective_structure_preservation():
    t0 = time.perf_counter()
    failures = []
    P = generate(GeneratorSpec(n=7, kind="defective-fixture"))
    report, _ = run(P, SolverConfig())
    result = eigenpairs(P, report.F_limit)
    w = result.full_values

    closure = max(np.min(np.abs(w + w[j].conj())) for j in range(len(w)))
    if closure != 0.0:
        failures.append(f"quadruple closure not exact: {closure:.3e}")

    quadruples = [4.0549e-1 + 5.9927e-5j, 3.6378e-1 + 5.8959e-5j]
    worst = 0.0
    for base in quadruples:
        for t in (base, base.conjugate(), -base, -base.conjugate()):
            worst = max(worst, np.min(np.abs(w - t)) / abs(base))
    if worst > 1e-4:
        failures.append(
            f"non-defective quadruples deviate {worst:.3e} > 1e-4 from "
            "published values (fixture entries up to 10.378 printed to 5 "
            "significant digits give ~5e-4 absolute data truncation)")

    prec = prec_compare(oracle.eig_direct(P).values, w)
    if not prec <= -2.0:
        failures.append(f"prec vs eig_direct {prec:.4f} > -2.0")

    elapsed = time.perf_counter() - t0
    if elapsed >= 1.0:
        failures.append(f"runtime {elapsed:.2f}s >= 1s")
    assert not failures, "; ".join(failures)


def test_A3_quadratic_convergence_and_residual():
    t0 = time.perf_counter()
    cfg = SolverConfig(conv_tol=1e-10)
    for n in (16, 64, 128):
        for seed in range(20):
            P = generate(GeneratorSpec(n=n, kind="random-complex",
                                       seed=seed, gap=2.0))
            report, _ = run(P, cfg)
            assert report.converged, (n, seed)
            assert report.iterations <= 12, (n, seed, report.iterations)
            assert report.regime == "quadratic", (n, seed, report.regime)
            result = eigenpairs(P, report.F_limit)
            rr = residuals(P, result,
                           reference=oracle.eig_direct(P).values)
            assert rr.decomposition_residual <= 1e-10, \
                (n, seed, rr.decomposition_residual)
            assert rr.prec <= -8.0, (n, seed, rr.prec)
    assert time.perf_counter() - t0 < 60.0


def test_A4_shift_bound_properties():
    rng = np.random.default_rng(42)
    for trial in range(50):
        n = int(rng.integers(2, 65))
        P = generate(GeneratorSpec(n=n, kind="random-complex",
                                   seed=1000 + trial))
        pair = build_ssf1(P, select_alpha(P).alpha)
        assert np.linalg.norm(pair.F, 2) < 1.0, (trial, n)
        evals = np.linalg.eigvalsh(pair.E)
        dist = min(abs(e) if e < 0 else abs(e - 2.0) if e > 2 else 0.0
                   for e in evals)
        assert dist > 0.0, (trial, n, evals)


def test_A5_doubling_transform_invariants():
    for seed in range(5):
        for n in (2, 4, 8):
            P = generate(GeneratorSpec(n=n, kind="random-complex", seed=seed))
            pair = build_ssf1(P, select_alpha(P).alpha)
            M0, L0 = pair_matrices(pair)
            w0 = scipy.linalg.eig(M0, L0, right=False)
            J = np.block([[np.zeros((n, n)), np.eye(n)],
                          [-np.eye(n), np.zeros((n, n))]])
            for k in range(1, 4):
                pair = doubling_step(pair)
                Mk, Lk = pair_matrices(pair)
                wk = scipy.linalg.eig(Mk, Lk, right=False)
                assert _greedy_rel(w0 ** (2 ** k), wk) <= 1e-6, (seed, n, k)
                defect = np.linalg.norm(Mk @ J @ Mk.T - Lk @ J @ Lk.T)
                assert defect <= 1e-9 * np.linalg.norm(pair.E) ** 2, \
                    (seed, n, k, defect)


def test_A6_dct_retrogression_bounds():
    rng = np.random.default_rng(0)
    radius = 10.0 ** rng.uniform(-3, 3, 200)
    phase = rng.uniform(np.pi / 2 + 1e-3, 3 * np.pi / 2 - 1e-3, 200)
    lams = radius * np.exp(1j * phase)
    alpha = 1.0
    for k0 in (2, 3, 4):
        for kappa in (2.0, 4.0):
            params = DctParams(theta=1, beta=1.0, kappa=kappa, k0=k0)
            for lam in lams:
                delta = abs((lam + alpha) / (lam - alpha))
                nu = abs(spectral_map(lam, alpha, params))
                bound = max(delta ** (2.0 ** (k0 - 2)),
                            kappa ** (-2.0 ** (k0 - 2)))
                assert nu <= bound + 1e-12, (k0, kappa, lam)
            for lam in -radius:  # real negative: sharper exponent
                delta = abs((lam + alpha) / (lam - alpha))
                nu = abs(spectral_map(lam, alpha, params))
                bound = max(delta ** (2.0 ** k0), kappa ** (-2.0 ** k0))
                assert nu <= bound + 1e-12, (k0, kappa, lam)


def _gentle_problem(n, seed):
    """Well-coupled definite problem with moderate ||F_inf||."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = 0.5 * (G + G.conj().T)
    B = np.eye(n) + 0.3 * 0.5 * (K + K.T)
    K2 = np.block([[A, B], [B.conj(), A.conj()]])
    lam_min = float(np.linalg.eigvalsh(K2).min())
    A = A + (1.0 + max(0.0, -lam_min)) * np.eye(n)
    return validate(A, B, tol=1e-10)


def test_A7_three_recursion_equivalence():
    cases = [(8, 0), (8, 1), (16, 2), (16, 3), (24, 4),
             (24, 5), (32, 6), (32, 7), (12, 8), (20, 9)]
    for i, (n, seed) in enumerate(cases):
        P = _gentle_problem(n, seed)
        pair0 = build_ssf1(P, select_alpha(P).alpha)
        pair = pair0
        for _ in range(40):
            ok, _ = breakdown_probe(pair, 1e-8)
            assert ok, "problem must converge without remedies"
            pair = doubling_step(pair)
            if np.linalg.norm(pair.E) < 1e-13:
                break
        F_inf = pair.F
        norm_f = np.linalg.norm(F_inf)

        forced = doubling_step(doubling_step(pair0))
        rng = np.random.default_rng(100 + i)
        Z = trirec.draw_z(n, float(np.linalg.norm(forced.F)), rng)

        tri = trirec.init_three(forced, Z)
        for _ in range(40):
            tri = trirec.three_step(tri)
            if np.linalg.norm(tri.P) < 1e-13:
                break
        F_fold = trirec.fold_back(tri, 1e-12)
        assert np.linalg.norm(F_fold - F_inf) / norm_f <= 1e-10, (n, seed)

        tri = trirec.init_three(forced, Z)
        for j in range(40):
            if j == 2:
                Znew = trirec.draw_z(n, float(np.linalg.norm(tri.G)), rng)
                tri = trirec.rebase_z(tri, Znew)
            tri = trirec.three_step(tri)
            if np.linalg.norm(tri.P) < 1e-13:
                break
        F_rebase = trirec.fold_back(tri, 1e-12)
        assert np.linalg.norm(F_rebase - F_fold) / norm_f <= 1e-10, (n, seed)


def test_A8_scalar_golden_chain():
    P = validate(np.array([[2.0 + 0j]]), np.array([[1.0 + 0j]]))
    pair = build_ssf1(P, 4.0)
    assert abs(pair.E[0, 0] - (-13.0 / 3.0)) <= 1e-10
    assert abs(pair.F[0, 0] - (-8.0 / 3.0)) <= 1e-10
    pair1 = doubling_step(pair)
    assert abs(pair1.E[0, 0] - (-169.0 / 55.0)) <= 1e-10   # -3.0727...
    assert abs(pair1.F[0, 0] - (304.0 / 55.0)) <= 1e-10    # 5.5273...
    report, _ = run(P, SolverConfig(alpha=4.0))
    assert abs(report.F_limit[0, 0] - (2.0 + np.sqrt(3.0))) <= 1e-10
    Hr = reduced_matrix(P, report.F_limit)
    assert abs(Hr[0, 0] - (-np.sqrt(3.0))) <= 1e-10
    # scalar double-Cayley chain at the initial pair, theta = beta = 1
    E, F = pair.E[0, 0], pair.F[0, 0]
    Z = 1.0 - E + np.conj(F) * F / (np.conj(E) - 1.0)
    assert abs(Z - 4.0) <= 1e-10
    C = compress(pair, DctParams(theta=1, beta=1.0, kappa=2.0, k0=0))
    assert abs(C.Ahat[0, 0] - 0.5) <= 1e-10
    assert abs(C.Bhat[0, 0] - 0.25) <= 1e-10


def test_A9_dos_integral():
    P = generate(GeneratorSpec(n=16, kind="random-complex", seed=7, gap=2.0))
    report, _ = run(P, SolverConfig())
    result = eigenpairs(P, report.F_limit)
    extent = (result.full_values.real.max() - result.full_values.real.min())
    half = 0.75 * extent
    grid = np.linspace(-half, half, 4001)
    density = spectral_density(result, grid, broadening=extent / 200.0,
                               kind="dos")
    integral = np.trapezoid(density.values, density.grid)
    assert abs(integral - 1.0) <= 1e-3, integral
