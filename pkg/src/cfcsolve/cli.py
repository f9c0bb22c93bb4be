"""Command-line front end: ``cfcsolve {analyze,decide,solve,verify,congruence,reduce}``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from .blocks import BlockSum
from .congruence import DEFAULT_SEED, DEFAULT_TOLERANCE, CongruenceEngine
from .errors import (CfcError, ConstructionBudgetExhausted, CongruenceNotFound,
                     NotCongruent, SqrtFailure)
from .invariants import census, rank_identity_check, tau_upsilon
from .io_formats import (MuReplacedWarning, dumps_matrix, matrix_to_json, parse_blocksum,
                         read_matrix, write_matrix)
from .kernel import Matrix
from .reduction import reduce
from .solver import CONSISTENT, INCONSISTENT, UNDECIDED, decide, normalize_symmetric, solve, verify

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

TOLERANCE_ENV = "CFCSOLVE_TOLERANCE"

_STATUS_EXIT = {CONSISTENT: EXIT_OK, INCONSISTENT: EXIT_INCONSISTENT, UNDECIDED: EXIT_UNDECIDED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOLERANCE_ENV} must be a float, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--tolerance", type=float, default=None,
                        help=f"numeric tolerance (default 1e-9, env {TOLERANCE_ENV})")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write the main output matrix here")

    p = _Parser(prog="cfcsolve", description="Solve X^T A X = B for A in canonical form "
                "for congruence and symmetric B.")
    p.add_argument("--version", action="version", version=f"cfcsolve {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="census, tau, upsilon")
    a.add_argument("blocks", help="block sum, e.g. 'J3 + H2(-1)*2'")

    for name, text in (("decide", "decide consistency"), ("solve", "decide and construct X")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("blocks")
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--m", type=int, help="target rank, B = I_m")
        g.add_argument("--B", help="symmetric B as JSON/CSV ('-' for stdin)")
        if name == "solve":
            s.add_argument("--no-chain", action="store_true", help="omit the chain from the output")

    v = sub.add_parser("verify", parents=[common], help="check X^T A X = B")
    v.add_argument("A", help="block sum or matrix file")
    v.add_argument("X", help="matrix file ('-' for stdin); a solve output document works")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--B")

    c = sub.add_parser("congruence", parents=[common], help="P with P^T A P = B")
    c.add_argument("A", help="matrix file or block sum")
    c.add_argument("B", help="matrix file or block sum")

    r = sub.add_parser("reduce", parents=[common], help="absorption chain and end case")
    r.add_argument("blocks")
    return p


def _matrix_or_blocks(arg: str) -> Matrix:
    if arg == "-" or Path(arg).is_file():
        return read_matrix(arg)
    return parse_blocksum(arg).materialize(allow_noncanonical=True)


def _target_B(args):
    if args.m is not None:
        if args.m < 0:
            raise UsageError("--m must be nonnegative")
        return None
    return read_matrix(args.B)


def _emit(obj, args, text_lines=None):
    if args.format == "json":
        out = json.dumps(obj, indent=2, ensure_ascii=False)
    else:
        out = "\n".join(text_lines if text_lines is not None else _text(obj))
    sys.stdout.write(out + "\n")


def _text(obj, indent=""):
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.extend(_text(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{indent}{k}:")
            lines.extend(f"{indent}  [" + ", ".join(map(str, r)) + "]" for r in v)
        elif isinstance(v, list):
            lines.append(f"{indent}{k}: " + "; ".join(map(str, v)))
        else:
            lines.append(f"{indent}{k}: {v}")
    return lines


def _cmd_analyze(args, notes):
    s = parse_blocksum(args.blocks, notes=notes)
    inv = tau_upsilon(s)
    ri = rank_identity_check(s)
    obj = {"blocks": str(s), "census": census(s).as_dict(), "tau": inv.tau,
           "upsilon": inv.upsilon, "min_bound": inv.min_bound,
           "rank_identity": {"lhs": ri.lhs, "rhs": ri.rhs, "equal": ri.equal}}
    if notes:
        obj["notes"] = notes
    _emit(obj, args)
    return EXIT_OK


def _cmd_decide(args, notes):
    s = parse_blocksum(args.blocks, notes=notes)
    B = _target_B(args)
    m = args.m if B is None else normalize_symmetric(B).m
    dec = decide(s, m)
    dec.notes[:0] = notes
    _emit(dec.to_json(), args)
    return _STATUS_EXIT[dec.status]


def _cmd_solve(args, notes, tol):
    s = parse_blocksum(args.blocks, notes=notes)
    B = _target_B(args)
    engine = CongruenceEngine(seed=args.seed, tolerance=tol)
    if B is None:
        dec = solve(s, m=args.m, seed=args.seed, tolerance=tol, engine=engine)
    else:
        dec = solve(s, B=B, seed=args.seed, tolerance=tol, engine=engine)
    dec.notes[:0] = notes
    if args.out and dec.X is not None:
        write_matrix(dec.X, args.out)
    _emit(dec.to_json(include_chain=not args.no_chain), args)
    return _STATUS_EXIT[dec.status]


def _cmd_verify(args, notes, tol):
    A = _matrix_or_blocks(args.A)
    X = read_matrix(args.X)
    if args.m is not None:
        if args.m != X.cols:
            raise CfcError(f"X has {X.cols} columns but --m is {args.m}")
        B = Matrix.identity(args.m)
    else:
        B = read_matrix(args.B)
    rep = verify(A, X, B, args.tolerance)
    _emit(rep.to_json(), args)
    return EXIT_OK if rep.ok else EXIT_INCONSISTENT


def _cmd_congruence(args, notes, tol):
    A = _matrix_or_blocks(args.A)
    B = _matrix_or_blocks(args.B)
    engine = CongruenceEngine(seed=args.seed, tolerance=tol)
    try:
        w = engine.find(A, B)
    except NotCongruent as exc:
        _emit({"congruent": False, "reason": str(exc)}, args)
        return EXIT_INCONSISTENT
    if args.out:
        write_matrix(w.P, args.out)
    obj = {"congruent": True, "P": matrix_to_json(w.P), "residual": w.residual_norm,
           "mode": w.mode, "method": w.method, "seed": w.seed}
    if w.notes:
        obj["notes"] = w.notes
    _emit(obj, args)
    return EXIT_OK


def _cmd_reduce(args, notes, tol):
    s = parse_blocksum(args.blocks, notes=notes)
    engine = CongruenceEngine(seed=args.seed, tolerance=tol)
    res = reduce(s, engine, pair_h4=True)
    res.chain.verify(tol)
    obj = {"source": str(s), "end_state": str(res.end_state), "case": res.case,
           "steps": len(res.chain.steps), "chain": res.chain.to_json()}
    if notes:
        obj["notes"] = notes
    _emit(obj, args)
    return EXIT_OK


def _error(args_format, code, exc):
    if args_format == "json":
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                     "exit_code": code}) + "\n")
    else:
        sys.stderr.write(f"cfcsolve: {type(exc).__name__}: {exc}\n")
    return code


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json"
    if "--format" in argv:
        i = argv.index("--format")
        if i + 1 < len(argv) and argv[i + 1] in ("json", "text"):
            fmt = argv[i + 1]
    notes: list = []
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        tol = args.tolerance if args.tolerance is not None else _default_tolerance()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MuReplacedWarning)
            if args.command == "analyze":
                return _cmd_analyze(args, notes)
            if args.command == "decide":
                return _cmd_decide(args, notes)
            if args.command == "solve":
                return _cmd_solve(args, notes, tol)
            if args.command == "verify":
                return _cmd_verify(args, notes, tol)
            if args.command == "congruence":
                return _cmd_congruence(args, notes, tol)
            return _cmd_reduce(args, notes, tol)
    except UsageError as exc:
        return _error(fmt, EXIT_USAGE, exc)
    except (ConstructionBudgetExhausted, CongruenceNotFound, SqrtFailure) as exc:
        return _error(fmt, EXIT_INTERNAL, exc)
    except (CfcError, OSError, ValueError) as exc:
        return _error(fmt, EXIT_DATA, exc)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to an exit code
        return _error(fmt, EXIT_INTERNAL, exc)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
