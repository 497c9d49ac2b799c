"""Command-line interface.

Exit codes: 0 ok, 1 validation failure, 2 usage/input error,
3 numerical failure or non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys as _sys
from typing import Optional, Sequence

import numpy as np

from . import experiments
from .expr import ExpressionError
from .linalg import GramianError, HorizonError
from .model_io import (
    METHODS,
    SchemaError,
    ValidationError,
    document_horizon,
    entry_columns,
    read_document,
    system_from_document,
    write_sweep_csv,
)
from .recursive import obs_recursion_dual
from .riccati import DEFAULT_MAX_ITER, DEFAULT_TOL, solve_dare_fixed_point
from .system import TimeInvariantLinearSystem, lift_lti, validate

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path: str, check: bool = True):
    try:
        doc = read_document(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    return doc, system_from_document(doc, check=check)


def _as_ltv(doc: dict, sys, w_needed: int):
    if isinstance(sys, TimeInvariantLinearSystem):
        N = document_horizon(doc)
        return lift_lti(sys, N if N is not None else max(w_needed - 1, 0))
    return sys


def cmd_validate(args) -> int:
    _, sys = _load(args.system, check=False)
    report = validate(sys)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def _print_trace(method: str, sys, w: int) -> None:
    trace = obs_recursion_dual(sys, w)
    n = sys.state_dim
    writer = csv.writer(_sys.stdout, lineterminator="\n")
    writer.writerow(["method", "step", "anchor", *entry_columns(n)])
    for i, (m, anchor) in enumerate(zip(trace.matrices, trace.anchors)):
        writer.writerow([method, i + 1, anchor, *(repr(float(x)) for x in m.ravel())])


def cmd_gramian(args) -> int:
    doc, sys = _load(args.system)
    sys = _as_ltv(doc, sys, args.w)
    try:
        experiments.check_supported(args.kind, args.method, sys)
    except experiments.UnsupportedMethodError as exc:
        raise UsageError(str(exc)) from exc
    if not 1 <= args.w <= sys.horizon + 1:
        raise UsageError(f"window {args.w} outside 1..{sys.horizon + 1}")
    if args.trace:
        if args.method != "recursive_dual":
            raise UsageError("--trace is only available for method recursive_dual")
        _print_trace(args.method, sys, args.w)
        return EXIT_OK
    record = experiments.record_for(sys, args.method, args.w, args.kind, timing=args.timing)
    write_sweep_csv([record], _sys.stdout, n=sys.state_dim)
    return EXIT_OK if record.ok else EXIT_NUMERIC


def _parse_methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in experiments.ALL_METHODS]
    if unknown or not methods:
        raise UsageError(f"unknown methods: {', '.join(unknown) or '(none given)'}")
    return methods


def cmd_sweep(args) -> int:
    doc, sys = _load(args.system)
    sys = _as_ltv(doc, sys, args.w_max)
    methods = _parse_methods(args.methods)
    if not 1 <= args.w_max <= sys.horizon + 1:
        raise UsageError(f"--w-max {args.w_max} outside 1..{sys.horizon + 1}")
    try:
        records = experiments.sweep(
            sys, args.w_max, methods, args.kind, threads=args.threads, timing=args.timing
        )
    except experiments.UnsupportedMethodError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        write_sweep_csv(records, args.out, n=sys.state_dim)
    else:
        write_sweep_csv(records, _sys.stdout, n=sys.state_dim)
    return EXIT_OK


def cmd_dare(args) -> int:
    _, sys = _load(args.system)
    if not isinstance(sys, TimeInvariantLinearSystem):
        raise UsageError("dare needs a time-invariant (kind=lti) system")
    if sys.q is None:
        raise UsageError("dare needs process noise (q)")
    sol = solve_dare_fixed_point(sys, tol=args.tol, max_iter=args.max_iter)
    print("F_inf =")
    for row in sol.f_inf.matrix:
        print("  " + " ".join(f"{x:.12g}" for x in row))
    print(f"iterations = {sol.iterations}")
    print(f"residual = {sol.residual:.6g}")
    print(f"converged = {str(sol.converged).lower()}")
    return EXIT_OK if sol.converged else EXIT_NUMERIC


def cmd_reproduce_fig1(args) -> int:
    path = experiments.reproduce_fig1(args.out, N=args.N)
    print(path)
    return EXIT_OK


def cmd_reproduce_fig2(args) -> int:
    for path in experiments.reproduce_fig2(args.out, threads=args.threads, timing=args.timing):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochgram",
        description="Stochastic observability and constructability Gramians of linear systems.",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="fixed-point tolerance")
    parser.add_argument(
        "--no-timing",
        dest="timing",
        action="store_false",
        help="write wall_ns=0 so output is byte-for-byte reproducible",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file")
    p.add_argument("system")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gramian", help="compute one Gramian as a CSV row")
    p.add_argument("system")
    p.add_argument("--kind", choices=("obs", "cons"), default="obs")
    p.add_argument("--method", choices=experiments.ALL_METHODS, default="recursive_dual")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--trace", action="store_true", help="print every recursion iterate")
    p.set_defaults(func=cmd_gramian)

    p = sub.add_parser("sweep", help="Gramians for w = 1..W with several methods")
    p.add_argument("system")
    p.add_argument("--w-max", type=int, required=True)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--kind", choices=("obs", "cons"), default="obs")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dare", help="steady-state observability Gramian of an LTI system")
    p.add_argument("system")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    # Also accepted after the subcommand; overrides the global value.
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="fixed-point tolerance")
    p.set_defaults(func=cmd_dare)

    p = sub.add_parser("reproduce-fig1", help="total information per state along a trajectory")
    p.add_argument("--out", required=True)
    p.add_argument("--N", type=int, default=60)
    p.set_defaults(func=cmd_reproduce_fig1)

    p = sub.add_parser("reproduce-fig2", help="stability comparison of the three methods")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reproduce_fig2)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(exc, file=_sys.stderr)
        return EXIT_INVALID
    except (UsageError, SchemaError, ExpressionError, HorizonError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (GramianError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=_sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    _sys.exit(main())
