"""Acceptance criteria, one test per criterion.

Each criterion function returns (passed, detail).  Under pytest the lines
are printed in the terminal summary; run this file directly to print them
without pytest.
"""

import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from latticetodd import brion, emops, oracle
from latticetodd.arith import Polynomial, monomials_up_to
from latticetodd.cli import Problem, load_document
from latticetodd.fan import Cone, fibration_multiplicities

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"

# tolerances
COMPLEX_TOL = 1e-8
MOLIEN_TOL = 1e-9
IMAG_TOL = 1e-12
COUNT_SECONDS = 10
DELZANT_SECONDS = 30

RESULTS = {}


def corpus():
    return {p.stem: Problem(load_document(p)).P for p in sorted(CORPUS.glob("*.json"))}


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    return ok, detail


def monomials(n, degree=3):
    return [Polynomial(n, {a: F(1)}) for a in monomials_up_to(n, degree)]


# ---------------------------------------------------------------------------


def criterion_1():
    polys = corpus()
    start = time.perf_counter()
    bad = [k for k, P in polys.items() if brion.brion_count(P) != oracle.count(P)]
    elapsed = time.perf_counter() - start
    ok = len(polys) >= 8 and not bad and elapsed < COUNT_SECONDS
    return record(1, ok, f"{len(polys)} polytopes, mismatches {bad}, {elapsed:.2f}s "
                         f"(limit {COUNT_SECONDS}s)")


def criterion_2():
    bad = []
    for name, P in corpus().items():
        S = brion.vertex_sums(P)
        dirs = [brion.generic_direction(S, seed) for seed in range(3)]
        if len(set(dirs)) != 3:
            bad.append((name, "directions"))
        for xi in dirs:
            if any(c != 0 for c in brion.pole_parts(P, xi)):
                bad.append((name, xi))
    return record(2, not bad, f"3 directions per polytope; nonzero pole parts: {bad}")


def criterion_3():
    bad = []
    for name, P in corpus().items():
        w = brion.weighted_brion(P)
        top = w.one_plus_y_basis()
        top = top[P.dim] if len(top) > P.dim else 0
        if w != oracle.weighted_face_sum(P) or w(0) != oracle.count(P) \
                or top != oracle.interior_count(P):
            bad.append(name)
    return record(3, not bad, f"exact y-polynomials, y=0 and top coefficient; failures {bad}")


def criterion_4():
    polys = {k: P for k, P in corpus().items() if P.is_delzant()}
    start = time.perf_counter()
    failures = []
    checks = 0

    def run(name, rep):
        nonlocal checks
        checks += 1
        zero = rep.residual == 0 if not hasattr(rep.residual, "coeffs") else not rep.residual
        if not (rep.passed and rep.backend == emops.EXACT and zero):
            failures.append((name, rep.identity))

    for name, P in polys.items():
        run(name, emops.em_verify(P, None, "pick"))
        for f in monomials(P.dim):
            for kind in ("embv", "dual", "weighted", "vertex_spec"):
                run(name, emops.em_verify(P, f, kind))
            for m0 in [tuple(int(i == j) for j in range(P.dim)) for i in range(P.dim)]:
                run(name, emops.stokes_verify(P, f, m0))
    sq = polys["square"]
    for f in monomials(2):
        for mask in range(1 << sq.num_facets):
            K = [i for i in range(sq.num_facets) if mask >> i & 1]
            run("square", emops.em_verify(sq, f, "facets_removed", K=K))
        for i in range(len(sq.faces)):
            run("square", emops.em_verify(sq, f, "face_closed", face=i))
            run("square", emops.em_verify(sq, f, "face_relint", face=i))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < DELZANT_SECONDS and len(polys) >= 5
    return record(4, ok, f"{checks} exact checks on {sorted(polys)}, failures {failures[:5]}, "
                         f"{elapsed:.1f}s (limit {DELZANT_SECONDS}s)")


def criterion_5():
    polys = corpus()
    worst = 0.0
    failures = []
    for name in ("triangle", "nondelzant3d"):
        P = polys[name]
        assert not P.is_delzant()
        for f in monomials(P.dim, 2):
            reps = [emops.em_verify(P, f, "embv"), emops.em_verify(P, f, "dual"),
                    emops.em_verify(P, f, "guillemin")]
            reps += [emops.em_verify(P, f, "weighted", y=y) for y in (F(0), F(1), F(-1, 2))]
            for r in reps:
                worst = max(worst, float(r.residual))
                if not (r.passed and r.backend == emops.COMPLEX and r.residual < COMPLEX_TOL):
                    failures.append((name, r.identity))
    return record(5, not failures,
                  f"max residual {worst:.2e} (tol {COMPLEX_TOL}), failures {failures[:5]}")


def criterion_6():
    bad = []
    for name, P in corpus().items():
        E = brion.ehrhart_polynomial(P)
        val = lambda x: brion.polynomial_value(E, x)  # noqa: E731
        if val(0) != 1:
            bad.append((name, "E(0)"))
        for ell in range(1, 5):
            if val(ell) != oracle.count(P, scale=ell):
                bad.append((name, ell))
        for ell in range(1, 4):
            if (-1) ** P.dim * val(-ell) != oracle.interior_count(P, scale=ell):
                bad.append((name, -ell))
    return record(6, not bad, f"l=0..4, reciprocity l=1..3, E(0)=1; failures {bad}")


MOLIEN_CONES = {
    "smooth": [(1, 0), (0, 1)],
    "mult2": [(2, -1), (0, 1)],
    "mult3": [(3, -1), (0, 1)],
    "mult2_3d": [(1, 1, 0), (0, 1, 1), (1, 0, 1)],
}


def criterion_7():
    worst = worst_imag = 0.0
    failures = []
    for name, gens in MOLIEN_CONES.items():
        sigma = Cone(gens)
        C = sigma.dual()
        xi = tuple(sum(c) for c in zip(*sigma.generators))
        brute = oracle.graded_cone_counts(C.generators, xi, 20)
        g = brion.graded_coefficients(brion.molien_sum(sigma), xi, 20, y=0)
        err = max(abs(complex(a) - b) for a, b in zip(g.coefficients, brute))
        imag = max(abs(complex(a).imag) for a in g.coefficients)
        worst, worst_imag = max(worst, err), max(worst_imag, imag)
        exact = brion.graded_coefficients(brion.cone_exp_sum(C, (0,) * len(xi)), xi, 20, y=0)
        if err >= MOLIEN_TOL or imag >= IMAG_TOL or list(exact.coefficients) != brute:
            failures.append(name)
        wbrute = oracle.graded_cone_counts(C.generators, xi, 8, weighted=True) \
            if len(C.generators) == len(xi) else None
        if wbrute is not None:
            wg = brion.graded_coefficients(brion.molien_sum(sigma), xi, 8)
            for a, b in zip(wg.coefficients, wbrute):
                for k in range(max(a.degree, b.degree) + 1):
                    if abs(complex(a.coefficient(k)) - b.coefficient(k)) >= MOLIEN_TOL:
                        failures.append((name, "weighted"))
    return record(7, not failures, f"{len(MOLIEN_CONES)} cones, 20 coefficients, max error "
                                   f"{worst:.1e}, max imag {worst_imag:.1e}; failures {failures}")


def _brion_count_of_points(points):
    Q = brion.span_polytope(points)
    return 1 if Q is None else brion.brion_count(Q)


def criterion_8():
    polys = corpus()
    divisors = {
        "square": [[0] * 4, "ample", [0, 0, 0, 1]],
        "hexagon": [[0] * 6, "ample", [0, 0, 0, 0, 1, 1], "double"],
    }
    failures = []
    checks = 0
    for name, ds in divisors.items():
        P = polys[name]
        for D in ds:
            if D == "ample":
                D = [f.c for f in P.facets]
            elif D == "double":
                D = [2 * f.c for f in P.facets]
            data = fibration_multiplicities(P, D)
            if any(data.alternating_sum(E.active) != 1 for E in data.faces):
                failures.append((name, D, "rigidity"))
            r = emops.em_verify(P, None, "minkowski", divisor=D)
            checks += 1
            if not (r.passed and r.operator_value == _brion_count_of_points(data.vertices)):
                failures.append((name, D, "minkowski"))
    return record(8, not failures, f"{checks} nef divisors; failures {failures}")


def criterion_9():
    polys = corpus()
    worst = 0.0
    failures = []
    cases = [("square", v) for v in range(4)]
    tri = polys["triangle"]
    cases.append(("triangle", tri.vertex_index((1, 0))))
    for name, vid in cases:
        P = polys[name]
        for kind in ("todd", "dual"):
            for scale in (F(1, 2), F(1, 5)):
                r = emops.local_em_verify(P, vid, kind, None, scale, tol=COMPLEX_TOL)
                worst = max(worst, r.residual, r.params["molien_residual"])
                if not r.passed:
                    failures.append((name, vid, kind, scale))
    return record(9, not failures, f"{len(cases)} vertices x 2 kinds x 2 scales, max residual "
                                   f"{worst:.1e} (tol {COMPLEX_TOL}); failures {failures}")


def criterion_10():
    cmd = [sys.executable, "-m", "latticetodd", "report", str(CORPUS)]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    ok = same and all(r.returncode == 0 for r in runs) and len(runs[0].stdout) > 0
    return record(10, ok, f"two report runs, {len(runs[0].stdout)} bytes, identical={same}, "
                          f"exit codes {[r.returncode for r in runs]}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(10)])
def test_acceptance(criterion):
    ok, detail = criterion()
    assert ok, detail


def summary_lines():
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
            for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for c in CRITERIA:
        try:
            c()
        except Exception as exc:  # report and keep going
            record(int(c.__name__.split("_")[1]), False, f"error: {exc!r}")
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
