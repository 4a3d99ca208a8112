import numpy as np

from bsedoubling import oracle
from bsedoubling.doubling import SolverConfig, run
from bsedoubling.extract import eigenpairs, prec_compare
from bsedoubling.problem import GeneratorSpec, generate


def test_direct_and_pencil_agree():
    P = generate(GeneratorSpec(n=12, kind="random-complex", seed=0, gap=1.0))
    direct = oracle.eig_direct(P)
    pencil = oracle.eig_pencil(P)
    assert direct.method == "direct"
    assert pencil.method == "pencil"
    assert prec_compare(direct.values, pencil.values) <= -10.0


def test_direct_eigenpairs_valid():
    P = generate(GeneratorSpec(n=8, kind="random-complex", seed=1, gap=1.0))
    res = oracle.eig_direct(P)
    H = np.block([[P.A.mat, P.B.mat],
                  [-P.B.mat.conj(), -P.A.mat.conj()]])
    assert np.linalg.norm(H @ res.vectors - res.vectors @ np.diag(res.values)) < 1e-10


def test_compare_wrapper():
    P = generate(GeneratorSpec(n=8, kind="random-complex", seed=2, gap=2.0))
    report, _ = run(P, SolverConfig())
    result = eigenpairs(P, report.F_limit)
    prec = oracle.compare(result, oracle.eig_direct(P))
    assert prec <= -8.0
