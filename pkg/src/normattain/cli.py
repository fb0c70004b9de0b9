"""Command-line front end.

    normattain norm        --spec T.json [--dim 256] [--tol 1e-10]
    normattain check-n     --spec T.json
    normattain classify-an --spec T.json [--seed S --trials 200]
    normattain decompose   --spec T.json
    normattain numrange    --spec T.json --csv out.csv [--angles 360]
    normattain paper-suite [--seed S]

Reports go to stdout as JSON with sorted keys. Exit status is 0 on success,
1 on a computation error and 2 on a parse or usage error; in both failure
cases the only output is an ``{"error": ...}`` object.
"""

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .attainment import check_n
from .classify import AN, classify_an, sample_subspace_restrictions
from .deflation import deflate
from .errors import InvariantViolation, OperatorError, ParseError
from .numrange import numrange_boundary
from .spec_io import load_spec, serialize_subspace
from .spectral import Attained, NotAttained, operator_norm
from .suite import run_suite

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
CLASSIFY_MAX_DIM = 64
ZERO_TRIM = 1e-15


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _f(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _vector(v):
    v = np.asarray(v, dtype=complex)
    nz = np.nonzero(np.abs(v) > ZERO_TRIM)[0]
    v = v[: nz[-1] + 1] if nz.size else v[:1]
    return [{"re": _f(z.real), "im": _f(z.imag)} for z in v]


def _status(s):
    out = {"tag": s.tag}
    if isinstance(s, Attained):
        out["witness"] = _vector(s.witness)
    elif isinstance(s, NotAttained):
        out["rule"] = s.rule
    return out


def _norm_report(rep):
    return {
        "lower": _f(rep.lower),
        "upper": _f(rep.upper),
        "exact": _f(rep.exact),
        "status": _status(rep.attained),
        "method": rep.method,
        "lower_bounds": [_f(b) for b in rep.lower_bounds],
    }


def _subspace(m):
    try:
        return serialize_subspace(m)
    except InvariantViolation:
        return type(m).__name__


def cmd_norm(T, args, options):
    rep = operator_norm(T, max_dim=args.dim, tolerance=args.tol)
    return _norm_report(rep), [rep.method]


def cmd_check_n(T, args, options):
    cert = check_n(T, max_dim=args.dim, tolerance=args.tol)
    result = {
        "status": _status(cert.status),
        "norm": _f(cert.norm),
        "checks": list(cert.checks),
        "norm_report": _norm_report(cert.norm_report),
    }
    if cert.ambient_witness is not None and T.domain is not None:
        result["ambient_witness"] = _vector(cert.ambient_witness)
    return result, [cert.norm_report.method]


def cmd_classify_an(T, args, options):
    d = min(args.dim, CLASSIFY_MAX_DIM)
    v = classify_an(T, d=d)
    result = {"verdict": v.verdict, "rule": v.rule}
    if v.evidence is not None:
        result["evidence"] = {
            "subspace": _subspace(v.evidence.subspace),
            "gap": _f(v.evidence.gap),
            "certificate": v.evidence.certificate,
        }
    if args.seed is not None and v.verdict == AN:
        fal = sample_subspace_restrictions(T, d=d, trials=args.trials, seed=args.seed)
        result["falsifier"] = {"trials": args.trials, "dim": d, "worst_gap": _f(fal.worst_gap)}
    return result, list(v.derivation)


def cmd_decompose(T, args, options):
    n_max = options.get("n_max")
    if n_max is not None and (not isinstance(n_max, int) or n_max < 1):
        raise ParseError("n_max must be a positive integer", path="$.options.n_max")
    dec = deflate(T, n_max=n_max, d=args.dim, tol=args.tol)
    result = {
        "method": dec.method,
        "betas": [_f(b) for b in dec.betas],
        "residual_norm": _f(dec.residual_norm()),
        "orthonormality_error": _f(dec.orthonormality_error()),
        "beta_limit": _f(dec.beta_limit),
        "notes": list(dec.notes),
    }
    return result, [dec.method]


def write_csv(path, boundary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("theta,re,im\n")
        for theta, z in zip(boundary.thetas, boundary.points):
            fh.write(f"{theta:.17g},{z.real:.17g},{z.imag:.17g}\n")


def cmd_numrange(T, args, options):
    b = numrange_boundary(T, args.dim, args.angles)
    result = {"angles": len(b), "dim": args.dim}
    if args.csv:
        write_csv(args.csv, b)
        with open(args.csv, "rb") as fh:
            result["csv"] = {"path": args.csv, "sha256": hashlib.sha256(fh.read()).hexdigest()}
    pts = b.points
    result["real_range"] = [_f(pts.real.min()), _f(pts.real.max())]
    result["imag_range"] = [_f(pts.imag.min()), _f(pts.imag.max())]
    return result, ["support-function-sweep"]


COMMANDS = {
    "norm": cmd_norm,
    "check-n": cmd_check_n,
    "classify-an": cmd_classify_an,
    "decompose": cmd_decompose,
    "numrange": cmd_numrange,
}


def build_parser():
    p = _Parser(prog="normattain", description="Norm attainment checks for structured operators on l2.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in list(COMMANDS) + ["paper-suite"]:
        c = sub.add_parser(name)
        c.add_argument("--spec", required=name != "paper-suite", help="operator spec document (JSON)")
        c.add_argument("--dim", type=int, default=256, help="truncation dimension")
        c.add_argument("--angles", type=int, default=360, help="angle grid size for numrange")
        c.add_argument("--trials", type=int, default=200, help="falsifier trials for classify-an")
        c.add_argument("--seed", type=int, default=None, help="RNG seed for sampling")
        c.add_argument("--tol", type=float, default=1e-10, help="numerical tolerance")
        c.add_argument("--csv", default=None, help="CSV output path for numrange")
    return p


def _emit(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _error(kind, exc, code):
    err = {"type": kind, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["path"] = exc.path
        err["line"] = exc.line
    _emit({"error": err})
    return code


def _validate(args):
    if args.dim < 1:
        raise UsageError("--dim must be positive")
    if args.angles < 3:
        raise UsageError("--angles must be at least 3")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if not (args.tol > 0 and math.isfinite(args.tol)):
        raise UsageError("--tol must be a positive number")


def run(argv):
    """Run one command; returns (exit code, report or error object)."""
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
    except UsageError as exc:
        return EXIT_USAGE, {"error": {"type": "UsageError", "message": str(exc)}}

    if args.command == "paper-suite":
        seed = 0 if args.seed is None else args.seed
        rows = run_suite(seed)
        report = {
            "command": "paper-suite",
            "seed": seed,
            "result": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in rows],
            "passed": sum(r.passed for r in rows),
            "total": len(rows),
        }
        if report["passed"] != report["total"]:
            failed = [r.name for r in rows if not r.passed]
            return EXIT_COMPUTE, {"error": {"type": "SuiteFailure", "message": ", ".join(failed)}, "report": report}
        return EXIT_OK, report

    try:
        with open(args.spec, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        T, options = load_spec(args.spec)
    except OSError as exc:
        return EXIT_USAGE, {"error": {"type": "UsageError", "message": str(exc)}}
    except (ParseError, InvariantViolation) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            err.update(path=exc.path, line=exc.line)
        return EXIT_USAGE, {"error": err}

    try:
        result, derivation = COMMANDS[args.command](T, args, options)
    except ParseError as exc:
        return EXIT_USAGE, {"error": {"type": type(exc).__name__, "message": str(exc), "path": exc.path, "line": exc.line}}
    except OperatorError as exc:
        return EXIT_COMPUTE, {"error": {"type": type(exc).__name__, "message": str(exc)}}

    report = {
        "command": args.command,
        "input_digest": digest,
        "result": result,
        "derivation": derivation,
        "tolerances": {"tol": args.tol, "dim": args.dim},
        "seed": args.seed,
    }
    if args.command == "numrange":
        report["tolerances"]["angles"] = args.angles
    return EXIT_OK, report


def main(argv=None):
    code, obj = run(sys.argv[1:] if argv is None else argv)
    _emit(obj)
    return code


if __name__ == "__main__":
    sys.exit(main())
