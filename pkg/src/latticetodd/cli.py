"""Command-line interface: JSON polytope documents in, JSON reports out."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__, brion, emops, oracle
from .arith import Polynomial, YPolynomial, format_rational, parse_rational
from .errors import LatticeToddError, SchemaError, VerificationError
from .polytope import from_halfspaces, from_vertices

IDENTITIES = (
    "embv", "dual", "facets-removed", "face", "face-relint", "weighted", "weighted-hat",
    "weighted-facets-removed", "weighted-face", "guillemin", "stokes", "minkowski", "local",
    "pick", "vertex-spec",
)
# identities run by `report` for every simple polytope
SUITE = ("embv", "dual", "weighted", "weighted-hat", "guillemin", "stokes", "pick", "vertex-spec")


# ---------------------------------------------------------------------------
# input


def _schema():
    text = resources.files("latticetodd").joinpath("schemas/polytope.schema.json").read_text()
    return json.loads(text)


def load_document(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {where}: {exc.message}") from None
    n = doc["dim"]
    vecs = doc.get("vertices") or [fc["u"] for fc in doc["facets"]]
    if any(len(v) != n for v in vecs):
        raise SchemaError(f"{path}: vector length differs from dim {n}")
    for term in doc.get("f", []):
        if len(term["exponents"]) != n:
            raise SchemaError(f"{path}: exponent vector length differs from dim {n}")
    return doc


class Problem:
    """A parsed document: the polytope plus optional y, f and divisor."""

    def __init__(self, doc: dict):
        self.doc = doc
        if "vertices" in doc:
            self.P = from_vertices(doc["vertices"])
        else:
            self.P = from_halfspaces([(fc["u"], fc["c"]) for fc in doc["facets"]])
        n = self.P.dim
        self.y = parse_rational(doc["y"]) if "y" in doc else None
        if "f" in doc:
            terms = {}
            for t in doc["f"]:
                e = tuple(t["exponents"])
                terms[e] = terms.get(e, 0) + parse_rational(t["coeff"])
            self.f = Polynomial(n, {e: c for e, c in terms.items() if c})
        else:
            self.f = Polynomial.constant(n, Fraction(1))
        self.divisor = doc.get("divisor")
        if self.divisor is not None and len(self.divisor) != self.P.num_facets:
            raise SchemaError(
                f"divisor has {len(self.divisor)} entries; the polytope has "
                f"{self.P.num_facets} facets")

    def echo(self):
        P = self.P
        return {
            "document": self.doc,
            "facets": [{"u": list(fc.u), "c": format_rational(fc.c)} for fc in P.facets],
            "vertices": [[format_rational(x) for x in v] for v in P.vertices],
        }


# ---------------------------------------------------------------------------
# output


def _approx(tol):
    return f"approx:{tol:g}"


def number(x, tol=emops.DEFAULT_TOL):
    """A scalar with its provenance tag."""
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, Fraction)):
        return {"value": format_rational(x), "provenance": "exact"}
    if isinstance(x, complex):
        return {"value": [x.real, x.imag], "provenance": _approx(tol)}
    if isinstance(x, float):
        return {"value": x, "provenance": _approx(tol)}
    if isinstance(x, YPolynomial):
        return ypoly(x, tol)
    if isinstance(x, (list, tuple)):
        return [number(v, tol) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _coef(c):
    if isinstance(c, (int, Fraction)):
        return format_rational(c)
    c = complex(c)
    return [c.real, c.imag]


def ypoly(p: YPolynomial, tol=emops.DEFAULT_TOL):
    exact = all(isinstance(c, (int, Fraction)) for c in p.coeffs)
    out = {"coefficients_in_y": [_coef(c) for c in p.coeffs] or ["0"],
           "provenance": "exact" if exact else _approx(tol)}
    if exact:
        out["coefficients_in_1_plus_y"] = [_coef(c) for c in p.one_plus_y_basis()] or ["0"]
    return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (int, Fraction, float, complex)) and not isinstance(x, bool):
        return number(x)
    return x


def em_report(rep: emops.EMReport):
    tol = rep.tolerance if rep.tolerance is not None else emops.DEFAULT_TOL
    return {
        "identity": rep.identity,
        "backend": rep.backend,
        "tolerance": rep.tolerance,
        "operator_value": number(rep.operator_value, tol),
        "lattice_value": number(rep.lattice_value, tol),
        "residual": number(rep.residual, tol),
        "passed": bool(rep.passed),
        "params": _plain(rep.params),
    }


# ---------------------------------------------------------------------------
# commands


def run_count(pb: Problem, args):
    b = brion.brion_count(pb.P, args.seed)
    o = oracle.count(pb.P)
    bi = brion.brion_interior_count(pb.P, args.seed)
    oi = oracle.interior_count(pb.P)
    return {"count": number(b), "oracle": number(o),
            "interior": {"count": number(bi), "oracle": number(oi)},
            "passed": b == o and bi == oi}


def run_weighted(pb: Problem, args):
    w = brion.weighted_brion(pb.P, args.seed)
    o = oracle.weighted_face_sum(pb.P)
    out = {"weighted": ypoly(w), "oracle": ypoly(o), "passed": w == o}
    if pb.y is not None:
        out["at_y"] = {"y": format_rational(pb.y), "value": number(w(pb.y))}
    return out


def run_ehrhart(pb: Problem, args):
    coeffs = brion.ehrhart_polynomial(pb.P, args.seed)
    n = pb.P.dim
    checks = []
    for ell in range(0, 5):
        brute = 1 if ell == 0 else oracle.count(pb.P, scale=ell)
        checks.append({"l": ell, "polynomial": number(brion.polynomial_value(coeffs, ell)),
                       "brute": number(brute)})
    recip = []
    for ell in range(1, 4):
        val = (-1) ** n * brion.polynomial_value(coeffs, -ell)
        recip.append({"l": ell, "polynomial": number(val),
                      "brute_interior": number(oracle.interior_count(pb.P, scale=ell))})
    ok = all(c["polynomial"] == c["brute"] for c in checks)
    ok = ok and all(c["polynomial"] == c["brute_interior"] for c in recip)
    return {"coefficients_in_l": [format_rational(c) for c in coeffs], "provenance": "exact",
            "checks": checks, "reciprocity": recip, "passed": ok}


def run_chi_y(pb: Problem, args):
    coeffs = brion.chi_y_polynomial(pb.P, args.seed)
    at0 = brion.polynomial_value(coeffs, 0)
    out = {"coefficients_in_1_plus_y": [format_rational(c) for c in coeffs],
           "provenance": "exact", "value_at_1_plus_y_0": number(at0), "passed": at0 == 1}
    if pb.y is not None:
        out["at_y"] = {"y": format_rational(pb.y),
                       "value": number(brion.polynomial_value(coeffs, 1 + pb.y))}
    return out


def _csv(text, conv=int):
    return [conv(x) for x in text.split(",") if x.strip()] if text else []


EM_DEFAULTS = {"K": None, "face": None, "backend": None, "order": None, "vertex": None,
               "z": None, "scale": "1", "local_kind": "todd", "m0": None}


def verify_identity(pb: Problem, kind: str, args) -> emops.EMReport:
    P = pb.P
    args = argparse.Namespace(**{**EM_DEFAULTS, **vars(args)})
    kind = {"face": "face_closed"}.get(kind, kind).replace("-", "_")
    tol = args.tol
    if kind == "local":
        z = _csv(args.z, parse_rational) if args.z else None
        vertex = args.vertex if args.vertex is not None else 0
        if not 0 <= vertex < len(P.vertices):
            raise SchemaError(f"vertex index {vertex} out of range 0..{len(P.vertices) - 1}")
        local_kind = args.local_kind
        y = pb.y if pb.y is not None else Fraction(0)
        return emops.local_em_verify(P, vertex, local_kind, z, parse_rational(args.scale),
                                     y=y, order=args.order or 24, tol=tol)
    face = args.face
    if kind in ("face_closed", "face_relint", "weighted_face") and face is None:
        raise SchemaError(f"--face is required for the {kind} identity")
    K = _csv(args.K)
    if kind in ("facets_removed", "weighted_facets_removed") and not K:
        raise SchemaError(f"--K is required for the {kind} identity")
    if kind == "minkowski" and pb.divisor is None:
        raise SchemaError("the minkowski identity needs a divisor in the document")
    m0 = _csv(args.m0) if args.m0 else None
    return emops.em_verify(P, pb.f, kind, K=K, face=face, y=pb.y, divisor=pb.divisor, m0=m0,
                           backend=args.backend, order=args.order, tol=tol)


def run_em_verify(pb: Problem, args):
    kinds = [k.strip() for k in args.identity.split(",") if k.strip()]
    for k in kinds:
        if k not in IDENTITIES:
            raise SchemaError(f"unknown identity {k!r}; choose from {', '.join(IDENTITIES)}")
    reports = [em_report(verify_identity(pb, k, args)) for k in kinds]
    return {"identities": reports, "passed": all(r["passed"] for r in reports)}


def run_suite(pb: Problem, args):
    """Everything `report` checks for one document."""
    out = {
        "count": run_count(pb, args),
        "weighted_count": run_weighted(pb, args),
        "ehrhart": run_ehrhart(pb, args),
        "chi_y": run_chi_y(pb, args),
    }
    if pb.P.is_simple():
        reps = [em_report(verify_identity(pb, k, args)) for k in SUITE]
        for vid in range(len(pb.P.vertices)):
            reps.append(em_report(emops.local_em_verify(pb.P, vid, "todd", tol=args.tol)))
        out["identities"] = reps
    else:
        out["identities"] = []
        out["note"] = "not simple: operator identities skipped"
    checks = [v["passed"] for k, v in out.items() if isinstance(v, dict)]
    checks += [r["passed"] for r in out["identities"]]
    out["checks"] = len(checks)
    out["failed"] = checks.count(False)
    out["passed"] = not out["failed"]
    return out


COMMANDS = {
    "count": run_count,
    "weighted-count": run_weighted,
    "ehrhart": run_ehrhart,
    "chi-y": run_chi_y,
    "em-verify": run_em_verify,
}


def _error(exc: LatticeToddError):
    return {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}


def run_report(args):
    root = Path(args.path)
    if not root.is_dir():
        raise SchemaError(f"{root} is not a directory")
    entries, summary = [], []
    exit_code = 0
    for path in sorted(root.glob("*.json"), key=lambda p: p.name):
        entry = {"file": path.name}
        start = time.perf_counter()
        try:
            pb = Problem(load_document(path))
            entry["input"] = pb.echo()
            entry["results"] = run_suite(pb, args)
            ok = entry["results"]["passed"]
            entry["status"] = "pass" if ok else "fail"
            summary.append({"file": path.name, "checks": entry["results"]["checks"],
                            "failed": entry["results"]["failed"], "status": entry["status"]})
            if not ok and not exit_code:
                exit_code = VerificationError.exit_code
        except LatticeToddError as exc:
            entry["status"] = "error"
            entry["error"] = _error(exc)
            summary.append({"file": path.name, "checks": 0, "failed": 0, "status": "error"})
            if not exit_code or exit_code == VerificationError.exit_code:
                exit_code = exc.exit_code
        if args.timing:
            entry["timing_seconds"] = round(time.perf_counter() - start, 3)
        entries.append(entry)
    doc = {"tool": "latticetodd", "version": __version__, "command": "report",
           "seed": args.seed, "tolerance": args.tol, "entries": entries, "summary": summary}
    return doc, exit_code


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = argparse.ArgumentParser(prog="latticetodd", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0,
                        help="offset into the deterministic direction search")
        sp.add_argument("--tol", type=float, default=emops.DEFAULT_TOL,
                        help="tolerance for the complex backend")
        sp.add_argument("--timing", action="store_true",
                        help="include wall-clock timings (reports are then not reproducible)")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    for name in ("count", "weighted-count", "ehrhart", "chi-y"):
        sp = sub.add_parser(name)
        sp.add_argument("path")
        common(sp)
    sp = sub.add_parser("em-verify")
    sp.add_argument("path")
    sp.add_argument("--identity", required=True,
                    help="comma-separated list of: " + ", ".join(IDENTITIES))
    sp.add_argument("--K", help="facet indices for facets-removed identities, e.g. 0,2")
    sp.add_argument("--face", type=int, help="face index (faces are listed by decreasing dim)")
    sp.add_argument("--backend", choices=("exact", "complex"))
    sp.add_argument("--order", type=int, help="operator truncation order")
    sp.add_argument("--vertex", type=int, help="vertex index for the local identity")
    sp.add_argument("--z", help='direction for the local identity, e.g. "-1/3,-1/5"')
    sp.add_argument("--scale", default="1", help="initial scale of z for the local identity")
    sp.add_argument("--local-kind", default="todd", choices=("todd", "dual", "weighted"))
    sp.add_argument("--m0", help="direction for the stokes identity, e.g. 1,0")
    common(sp)
    sp = sub.add_parser("report")
    sp.add_argument("path")
    common(sp)
    return p


def _emit(doc, output):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _glue_values(argv):
    # "--z -1/3,-1/5" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--z", "--m0"):
            out.append(f"{a}={next(it, '')}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        if args.command == "report":
            doc, code = run_report(args)
            _emit(doc, args.output)
            return code
        start = time.perf_counter()
        pb = Problem(load_document(args.path))
        results = COMMANDS[args.command](pb, args)
        doc = {"tool": "latticetodd", "version": __version__, "command": args.command,
               "seed": args.seed, "input": pb.echo(), "results": results}
        if args.timing:
            doc["timing_seconds"] = round(time.perf_counter() - start, 3)
        _emit(doc, args.output)
        return 0 if results["passed"] else VerificationError.exit_code
    except LatticeToddError as exc:
        print(f"latticetodd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
