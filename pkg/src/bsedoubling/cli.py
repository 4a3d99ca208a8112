"""Command-line front door: solve, generate, compare, spectrum.

Every JSON artifact carries a ``manifest`` recording the command, the
full flag set, the seed and library versions, so a run can be reproduced
exactly; wall-clock timings live only under ``manifest.timing`` so that
two runs with identical flags and seed produce byte-identical output
outside that subtree.

Exit codes: 0 success, 1 usage/input error, 2 non-convergence.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, oracle
from .cayley import select_alpha
from .doubling import SolverConfig, run
from .errors import BseError, MissingDipoles, NotConverged
from .extract import eigenpairs, prec_compare, residuals, spectral_density
from .problem import (GENERATOR_KINDS, GeneratorSpec, assemble_full, generate,
                      load_mtx, save_mtx)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2


def _limit_threads():
    """Honor BSE_DOUBLING_THREADS as a cap on kernel parallelism."""
    raw = os.environ.get("BSE_DOUBLING_THREADS")
    if not raw:
        return
    try:
        n = max(1, int(raw))
    except ValueError:
        print(f"ignoring non-integer BSE_DOUBLING_THREADS={raw!r}",
              file=sys.stderr)
        return
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(limits=n)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _manifest(command, args, timing):
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "command": command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "versions": {
            "bsedoubling": __version__,
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
        "timing": timing,
    }


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _parse_alpha(raw):
    if raw == "auto":
        return None
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--alpha must be 'auto' or a number, got {raw!r}")


def _parse_grid(raw):
    parts = raw.split(":")
    if len(parts) != 3:
        raise BseError(f"--grid must be lo:step:hi, got {raw!r}")
    try:
        lo, step, hi = (float(p) for p in parts)
    except ValueError:
        raise BseError(f"--grid must be numeric lo:step:hi, got {raw!r}")
    if step <= 0 or hi < lo:
        raise BseError(f"--grid needs step > 0 and hi >= lo, got {raw!r}")
    return np.arange(lo, hi + 0.5 * step, step)


def _events_json(events):
    return [{"k": e.k, "kind": e.kind} for e in events]


def _solver_config(args):
    return SolverConfig(conv_tol=args.tol,
                        max_iter=args.max_iter,
                        breakdown_tol=args.breakdown_tol,
                        remedy=args.remedy,
                        seed=args.seed,
                        alpha=args.alpha,
                        rho=args.rho)


def cmd_solve(args):
    timing = {}
    t0 = time.perf_counter()
    P = load_mtx(args.input_a, args.input_b)
    timing["load_ms"] = 1e3 * (time.perf_counter() - t0)

    t1 = time.perf_counter()
    try:
        report, _ = run(P, _solver_config(args))
        failed = None
    except NotConverged as exc:
        report, failed = exc.report, str(exc)
    timing["solve_ms"] = 1e3 * (time.perf_counter() - t1)

    t2 = time.perf_counter()
    eigenvalues = []
    residual = None
    warnings = list(report.warnings)
    if failed is None:
        result = eigenpairs(P, report.F_limit)
        rr = residuals(P, result)
        eigenvalues = [{"re": float(lam.real), "im": float(lam.imag)}
                       for lam in result.full_values]
        residual = rr.decomposition_residual
        warnings.extend(result.warnings)
    else:
        warnings.append(failed)
    timing["extract_ms"] = 1e3 * (time.perf_counter() - t2)
    timing["total_ms"] = 1e3 * (time.perf_counter() - t0)

    payload = {
        "manifest": _manifest("solve", args, timing),
        "n": P.n,
        "alpha": report.alpha,
        "iterations": report.iterations,
        "converged": report.converged,
        "regime": report.regime,
        "events": _events_json(report.events),
        "eigenvalues": eigenvalues,
        "residual": residual,
        "warnings": warnings,
    }
    _write_json(args.output, payload)
    if failed is not None:
        print(failed, file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_generate(args):
    if args.kind in ("defective-fixture", "breakdown-fixture") and \
            args.n is not None:
        print(f"warning: --n ignored for fixture kind {args.kind}",
              file=sys.stderr)
    n = args.n if args.n is not None else 1
    spec = GeneratorSpec(n=n, kind=args.kind, seed=args.seed, gap=args.gap)
    P = generate(spec)
    save_mtx(P, args.out_a, args.out_b,
             comments=[f"kind={args.kind} n={P.n} seed={args.seed} "
                       f"gap={args.gap}"])
    return EXIT_OK


def _oracle_metrics(P, method, baseline_values):
    t0 = time.perf_counter()
    res = oracle.eig_direct(P) if method == "direct" else oracle.eig_pencil(P)
    elapsed = 1e3 * (time.perf_counter() - t0)
    H = assemble_full(P)
    try:
        recon = res.vectors @ np.diag(res.values) @ np.linalg.inv(res.vectors)
        resid = float(np.linalg.norm(H - recon) / np.linalg.norm(H))
    except np.linalg.LinAlgError:
        resid = None
    prec = prec_compare(baseline_values, res.values)
    return {"prec": None if prec == -np.inf else prec,
            "residual": resid, "eTime_ms": elapsed}, res


def cmd_compare(args):
    if args.trials < 1:
        print("--trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = set(methods) - {"da", "direct", "pencil"}
    if unknown:
        print(f"unknown methods: {sorted(unknown)}", file=sys.stderr)
        return EXIT_USAGE

    t0 = time.perf_counter()
    P = load_mtx(args.input_a, args.input_b)
    baseline = oracle.eig_direct(P)
    rng = np.random.default_rng(args.seed)
    bound = select_alpha(P).alpha

    accum = {m: [] for m in methods}
    iterations = []
    for _ in range(args.trials):
        alpha = float(rng.uniform(bound, 2.0 * bound))
        for m in methods:
            if m == "da":
                t1 = time.perf_counter()
                report, _ = run(P, SolverConfig(alpha=alpha, seed=args.seed))
                result = eigenpairs(P, report.F_limit)
                rr = residuals(P, result)
                elapsed = 1e3 * (time.perf_counter() - t1)
                prec = prec_compare(baseline.values, result.full_values)
                accum[m].append({
                    "prec": None if prec == -np.inf else prec,
                    "residual": rr.decomposition_residual,
                    "eTime_ms": elapsed})
                iterations.append(report.iterations)
            else:
                metrics, _ = _oracle_metrics(P, m, baseline.values)
                accum[m].append(metrics)

    def mean(vals):
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else None

    summary = {}
    for m in methods:
        summary[m] = {key: mean([t[key] for t in accum[m]])
                      for key in ("prec", "residual", "eTime_ms")}
        if m == "da":
            summary[m]["iterations"] = mean(iterations)
    timing = {"total_ms": 1e3 * (time.perf_counter() - t0)}
    payload = {
        "manifest": _manifest("compare", args, timing),
        "n": P.n,
        "trials": args.trials,
        "methods": summary,
    }
    _write_json(args.output, payload)
    return EXIT_OK


def _load_dipoles(path, m):
    raw = np.loadtxt(path, ndmin=2)
    if raw.shape[1] == 2:
        vec = raw[:, 0] + 1j * raw[:, 1]
    elif raw.shape[1] == 1:
        vec = raw[:, 0].astype(complex)
    else:
        raise BseError(
            f"dipole file must have 1 (re) or 2 (re, im) columns, "
            f"got {raw.shape[1]}")
    if vec.shape[0] != m:
        raise BseError(
            f"dipole vector has {vec.shape[0]} entries, expected {m}")
    return vec


def cmd_spectrum(args):
    with open(args.eigs) as fh:
        solved = json.load(fh)
    values = np.array([lam["re"] + 1j * lam["im"]
                       for lam in solved["eigenvalues"]])
    if values.size == 0:
        print(f"{args.eigs} holds no eigenvalues (non-converged solve?)",
              file=sys.stderr)
        return EXIT_USAGE
    grid = _parse_grid(args.grid)

    if args.kind == "dos":
        # dos needs the eigenvalues only; rebuild a minimal result shell
        class _Values:
            full_values = values
        density = spectral_density(_Values(), grid, args.broadening,
                                   kind="dos")
    else:
        if args.dipoles is None:
            raise MissingDipoles("absorption spectra require --dipoles")
        # absorption weights need eigenvectors; recover them by re-solving
        # from the input files recorded in the solve manifest
        flags = solved.get("manifest", {}).get("flags", {})
        path_a, path_b = flags.get("input_a"), flags.get("input_b")
        if not path_a or not path_b:
            raise BseError(
                f"{args.eigs} lacks manifest input paths; absorption needs "
                "the original problem files to recover eigenvectors")
        P = load_mtx(path_a, path_b)
        report, _ = run(P, SolverConfig(
            alpha=flags.get("alpha"), seed=flags.get("seed", 0)))
        result = eigenpairs(P, report.F_limit)
        d = _load_dipoles(args.dipoles, 2 * P.n)
        density = spectral_density(result, grid, args.broadening,
                                   kind="absorption", dipoles=(d, d))

    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        out.write("omega,value\n")
        for w, v in zip(density.grid, density.values):
            out.write(f"{w:.17g},{v:.17g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bsedoubling",
        description="Structure-preserving doubling eigensolver for "
                    "Bethe-Salpeter eigenvalue problems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem from Matrix Market files")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--alpha", type=_parse_alpha, default=None,
                   help="Cayley shift: 'auto' or a positive number")
    p.add_argument("--rho", type=float, default=float(np.sqrt(2.0)))
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--breakdown-tol", type=float, default=1e-8)
    p.add_argument("--remedy", choices=("auto", "dct-first", "trirec-only"),
                   default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="output JSON ('-' = stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="generate a problem as Matrix Market")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap", type=float, default=0.0)
    p.add_argument("--out-a", required=True)
    p.add_argument("--out-b", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compare", help="accuracy/timing vs dense baselines")
    p.add_argument("--input-a", required=True)
    p.add_argument("--input-b", required=True)
    p.add_argument("--methods", default="da,direct,pencil")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-", help="output JSON ('-' = stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("spectrum", help="broadened spectral densities as CSV")
    p.add_argument("--eigs", required=True, help="JSON produced by solve")
    p.add_argument("--kind", choices=("dos", "absorption"), default="dos")
    p.add_argument("--broadening", type=float, required=True)
    p.add_argument("--grid", required=True,
                   help="real frequency grid lo:step:hi")
    p.add_argument("--dipoles", default=None,
                   help="text file with the dipole vector (re [im] columns)")
    p.add_argument("--output", default="-", help="output CSV ('-' = stdout)")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    _limit_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except NotConverged as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except BseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
