"""Command line interface: ``nctheta {eval,structure,verify,quiver}``.

Results go to stdout as JSON.  Errors go to stderr as
{"error": code, "detail": ...} with exit status 2 for malformed input,
3 for mathematical domain errors and 1 for a failed verification.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import heisenberg as hz
from .errors import DimensionMismatch, ThetaError
from .lattice import DEFAULT_TOL
from .linalg_core import (
    IntSymMatrix,
    SkewMatrix,
    parse_complex_matrix,
    parse_complex_vector,
    parse_int_matrix,
)
from .mirror_geometry import mirror_tensor
from .quiver_example import build_quiver, det4_family, enumerate_diag_symmetric
from .star_product import star_consistency_check
from .structure_constants import (
    LabelTriple,
    associativity_report,
    check_associativity,
    structure_tensor,
    verify_addition,
)
from .theta_eval import (
    SiegelPoint,
    ThetaCharacteristics,
    e_comm,
    e_nc,
    poisson_check,
    theta_with_char,
)

EXIT_FAIL, EXIT_PARSE, EXIT_MATH = 1, 2, 3

PRESETS = {
    "sec5": [IntSymMatrix.diag(1, -4), IntSymMatrix.diag(2, -2), IntSymMatrix.diag(4, -1)],
    "n1": [IntSymMatrix.diag(0), IntSymMatrix.diag(1), IntSymMatrix.diag(3)],
}
CHAIN_PRESETS = {
    "n1": [IntSymMatrix.diag(d) for d in (0, 1, 2, 4)],
    "n2": [IntSymMatrix([[-5, -2], [-2, 0]]), IntSymMatrix([[-3, -1], [-1, 1]]),
           IntSymMatrix([[-1, -1], [-1, 3]]), IntSymMatrix([[0, -2], [-2, 5]])],
}
DBAR_MODULI = [IntSymMatrix.diag(1), IntSymMatrix.diag(2), IntSymMatrix.diag(1, 2),
               IntSymMatrix.diag(3, 3)]


class UsageError(ThetaError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- literal parsing ----------------------------------------------------------

def parse_rational(text: str) -> float:
    """'p/q', an integer or a decimal; exact rationals are converted last."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_rational_list(text: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"malformed JSON {text!r}: {e.msg}") from None
        return [parse_rational(str(v)) for v in data]
    return [parse_rational(p) for p in text.split(",") if p.strip()]


def parse_int_vector(text: str) -> list[int]:
    vals = parse_rational_list(text)
    if any(not float(v).is_integer() for v in vals):
        raise UsageError(f"expected integers: {text!r}")
    return [int(v) for v in vals]


def parse_labels(text: str, n: int | None) -> list[IntSymMatrix]:
    """JSON list of integer matrices, or for n = 1 a comma list such as '0,1,3'."""
    text = text.strip()
    if text.startswith("[") and text.count("[") > 1:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise UsageError(f"malformed JSON {text!r}: {e.msg}") from None
        labels = [parse_int_matrix(m) for m in data]
    else:
        labels = [IntSymMatrix.diag(v) for v in parse_int_vector(text)]
    if n is not None and any(A.n != n for A in labels):
        raise DimensionMismatch(f"labels must be {n} x {n}")
    return labels


def theta_from_args(args, n: int) -> SkewMatrix:
    if getattr(args, "theta", None):
        th = parse_complex_matrix(args.theta, n)
        if np.any(th.imag != 0):
            raise UsageError("theta must be real")
        return SkewMatrix(th.real)
    t = getattr(args, "theta12", None)
    if t is None:
        return SkewMatrix.zero(n)
    if n < 2:
        raise UsageError("--theta12 needs n >= 2")
    return SkewMatrix.from_theta12(parse_rational(t), n)


def triple_from_args(args) -> list[IntSymMatrix]:
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        return PRESETS[args.preset]
    if args.A:
        labels = parse_labels(args.A, args.n)
        if len(labels) != 3:
            raise UsageError("--A needs exactly three labels")
        return labels
    if args.Aa and args.Ab and args.Ac:
        return [parse_int_matrix(x) for x in (args.Aa, args.Ab, args.Ac)]
    raise UsageError("give --preset, --A or all of --Aa/--Ab/--Ac")


def _fmt(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


# -- commands -----------------------------------------------------------------

def cmd_eval(args) -> int:
    tol = args.tol
    if args.kind == "theta":
        n = args.n
        omega = SiegelPoint(parse_complex_matrix(args.omega, n))
        z = parse_complex_vector(args.z, omega.n)
        c1 = parse_rational_list(args.c1) if args.c1 else [0.0] * omega.n
        c2 = parse_rational_list(args.c2) if args.c2 else [0.0] * omega.n
        if len(c1) != omega.n or len(c2) != omega.n:
            raise DimensionMismatch("characteristics must have length n")
        val, R = theta_with_char(ThetaCharacteristics(c1, c2), omega, z, tol, full_output=True)
    else:
        A_a, A_b = parse_int_matrix(args.Aa), parse_int_matrix(args.Ab)
        if A_a.n != A_b.n:
            raise DimensionMismatch("A_a and A_b differ in size")
        mu = parse_int_vector(args.mu) if args.mu else [0] * A_a.n
        z = parse_complex_vector(args.z, A_a.n)
        if args.kind == "e-comm":
            val, R = e_comm(A_a, A_b, mu, z, tol, full_output=True)
        else:
            val, R = e_nc(A_a, A_b, mu, z, theta_from_args(args, A_a.n), tol, full_output=True)
    _emit({"value": _fmt(val), "tol": tol, "truncation_radius": int(R)})
    return 0


def cmd_structure(args) -> int:
    labels = triple_from_args(args)
    theta = SkewMatrix.zero(labels[0].n) if args.commutative else theta_from_args(args, labels[0].n)
    t = LabelTriple(*labels, theta)
    T = structure_tensor(t, args.tol, commutative=args.commutative or None)
    _emit({"labels": [A.tolist() for A in labels], "theta": theta.array.tolist(),
           "shape": list(T.shape), "tensor": T.to_json()})
    return 0


def _verify(args) -> tuple[bool, dict]:
    check, seed = args.check, args.seed

    def pick(default):
        return args.tol if args.tol is not None else default

    def samples(default):
        return args.samples if args.samples is not None else default

    if check == "addition":
        labels = triple_from_args(args)
        t = LabelTriple(*labels, theta_from_args(args, labels[0].n))
        default = 1e-9 if t.n == 1 else 1e-8
        r = verify_addition(t, samples(20 if t.theta.is_zero() else 10), seed, pick(default))
        return r.passed, r.to_json()
    if check == "star":
        out, ok = {}, True
        if args.preset or args.A or args.Aa:
            labels = triple_from_args(args)
            t = LabelTriple(*labels, theta_from_args(args, labels[0].n))
            r = verify_addition(t, samples(10), seed, pick(1e-8))
            out["product_formula"] = r.to_json()
            ok = r.passed
        n = 2 if args.n is None else args.n
        s = star_consistency_check(n=n, seed=seed)
        out["engine"] = s.to_json()
        return ok and s.passed, {"check": "star", "passed": ok and s.passed, **out}
    if check == "mirror":
        labels = triple_from_args(args)
        m = mirror_tensor(*labels)
        c = structure_tensor(LabelTriple(*labels), 1e-14).values.real
        err = float(np.max(np.abs(m - c) / np.maximum(np.abs(c), 1e-300)))
        tol = pick(1e-10)
        return err <= tol, {"check": "mirror", "shape": list(m.shape), "max_rel_error": err,
                            "tol": tol, "passed": err <= tol}
    if check == "poisson":
        theta = theta_from_args(args, 2) if (args.theta12 or args.theta) else None
        r = poisson_check(cases=samples(5), seed=seed, tol=pick(1e-10), theta=theta)
        return r.passed, r.to_json()
    if check == "dbar":
        if args.Aa and args.Ab:
            pairs = [(parse_int_matrix(args.Aa), parse_int_matrix(args.Ab))]
        else:
            pairs = [(IntSymMatrix.zero(A.n), A) for A in DBAR_MODULI]
        reports = [hz.dbar_kernel_check(a, b, samples=samples(20), seed=seed, tol=pick(1e-6))
                   for a, b in pairs]
        ok = all(r.passed for r in reports)
        return ok, {"check": "dbar", "passed": ok, "cases": [r.to_json() for r in reports]}
    if check == "associativity":
        if args.A:
            labels = parse_labels(args.A, args.n)
        else:
            key = args.preset or "n1"
            labels = CHAIN_PRESETS.get(key) or PRESETS.get(key)
            if labels is None:
                raise UsageError(f"unknown preset {key!r}")
        theta = theta_from_args(args, labels[0].n)
        if len(labels) == 4:
            r = check_associativity(*labels, theta=theta, tol=pick(1e-9 if theta.is_zero() else 1e-8))
        else:
            r = associativity_report(labels, theta, pick(1e-9))
        return r.passed, r.to_json()
    if check in ("lemma23", "leibniz", "twisted"):
        fn = {"lemma23": hz.tmap_product_check, "leibniz": hz.leibniz_check,
              "twisted": hz.twisted_check}[check]
        kw = {}
        if args.preset or args.A or args.Aa:
            kw.update(zip(("A_a", "A_b", "A_c"), triple_from_args(args)))
        elif args.n is not None:
            kw["n"] = args.n
        if args.tol is not None:
            kw["tol"] = args.tol
        if args.samples is not None:
            kw["pairs" if check != "twisted" else "points"] = args.samples
        r = fn(seed=seed, **kw)
        return r.passed, r.to_json()
    if check == "curvature":
        A = parse_int_matrix(args.modulus) if args.modulus else None
        r = hz.curvature_check(A, elements=samples(5), seed=seed, tol=pick(1e-5))
        return r.passed, r.to_json()
    raise UsageError(f"unknown check {check!r}")


def cmd_verify(args) -> int:
    ok, report = _verify(args)
    _emit(report)
    return 0 if ok else EXIT_FAIL


def cmd_quiver(args) -> int:
    if args.preset:
        if args.preset != "sec5":
            raise UsageError("the only quiver preset is sec5")
        labels, names = det4_family(args.opposites)
    elif args.det is not None and args.bound is not None:
        labels = enumerate_diag_symmetric(args.n, args.det, args.bound)
        names = [f"A{i + 1}" for i in range(len(labels))]
    else:
        raise UsageError("give --preset sec5 or both --det and --bound")
    q = build_quiver(labels, names)
    if args.dot:
        Path(args.dot).write_text(q.to_dot())
    if args.json:
        Path(args.json).write_text(q.dumps())
    _emit(q.to_json())
    return 0


# -- parser -------------------------------------------------------------------

def _add_triple(p):
    p.add_argument("--preset", help="sec5 or n1")
    p.add_argument("--n", type=int)
    p.add_argument("--A", help="labels: JSON list of matrices, or '0,1,3' for n=1")
    p.add_argument("--Aa")
    p.add_argument("--Ab")
    p.add_argument("--Ac")


def _add_theta(p):
    p.add_argument("--theta12", help="theta_12 as a decimal or p/q")
    p.add_argument("--theta", help="full skew theta as a JSON matrix")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nctheta", description="Theta functions on (noncommutative) tori.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pe = sub.add_parser("eval", help="evaluate a single function value")
    pe.add_argument("kind", choices=["theta", "e-comm", "e-nc"])
    pe.add_argument("--n", type=int)
    pe.add_argument("--omega", help="JSON complex matrix; entries number or [re, im]")
    pe.add_argument("--z", required=True, help="JSON complex vector")
    pe.add_argument("--c1")
    pe.add_argument("--c2")
    pe.add_argument("--Aa")
    pe.add_argument("--Ab")
    pe.add_argument("--mu")
    _add_theta(pe)
    pe.add_argument("--tol", type=float, default=DEFAULT_TOL)
    pe.set_defaults(func=cmd_eval)

    ps = sub.add_parser("structure", help="tabulate structure constants")
    _add_triple(ps)
    _add_theta(ps)
    ps.add_argument("--commutative", action="store_true")
    ps.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ps.set_defaults(func=cmd_structure)

    pv = sub.add_parser("verify", help="run a property check")
    pv.add_argument("check", choices=["addition", "star", "mirror", "poisson", "lemma23", "dbar",
                                      "associativity", "leibniz", "curvature", "twisted"])
    _add_triple(pv)
    _add_theta(pv)
    pv.add_argument("--modulus", help="JSON integer matrix for the curvature check")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--samples", type=int)
    pv.add_argument("--tol", type=float)
    pv.set_defaults(func=cmd_verify)

    pq = sub.add_parser("quiver", help="Hom-space quiver of a label family")
    pq.add_argument("--preset")
    pq.add_argument("--det", type=int)
    pq.add_argument("--bound", type=int)
    pq.add_argument("--n", type=int, default=2)
    pq.add_argument("--opposites", action="store_true", help="with a preset, add the negated labels")
    pq.add_argument("--dot")
    pq.add_argument("--json")
    pq.set_defaults(func=cmd_quiver)
    return ap


def _fail(code: str, detail: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "detail": detail}) + "\n")
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail("usage", str(e), EXIT_PARSE)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    try:
        return args.func(args)
    except (UsageError, DimensionMismatch) as e:
        return _fail(e.code, str(e), EXIT_PARSE)
    except ThetaError as e:
        # a bare ThetaError comes from literal validation; subclasses are domain errors
        status = EXIT_PARSE if type(e) is ThetaError else EXIT_MATH
        return _fail(e.code if status == EXIT_MATH else "parse", str(e), status)
    except (ValueError, TypeError, OSError) as e:
        return _fail("parse", str(e), EXIT_PARSE)


if __name__ == "__main__":
    sys.exit(main())
