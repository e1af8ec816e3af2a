"""Command-line front end.

    clonecoh sweep      --machine ouqc --pipeline c2d --grid 201 --out sweep.csv
    clonecoh thresholds --machine pc --pipeline d2c
    clonecoh verify     --machine ouqc --grid 101 --tol 1e-9
    clonecoh report     --machine pc --pipeline c2d --beta 0.7071068

Exit status: 0 success, 1 bad arguments, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Optional, Sequence

import numpy as np

from .analysis import consumption_interval, emit_csv, sweep
from .errors import IsometryViolation, NoRoot
from .oracle import verify_all
from .pipelines import run


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clonecoh", description="Coherence under quantum cloning and deleting machines.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, help_ in (
        ("sweep", "write a CSV sweep over beta"),
        ("thresholds", "print the coherence-consumption interval"),
        ("verify", "check closed forms against brute-force simulation"),
        ("report", "print a single pipeline run"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--machine", choices=("ouqc", "pc"), default="ouqc")
        p.add_argument("--pipeline", choices=("c2d", "d2c"), default="c2d")
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--grid", type=int, default=201)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--out", default="-", help="output path, '-' for standard output")
    return parser


def _validate(args) -> None:
    if args.grid < 2:
        raise _UsageError("grid must be ≥ 2")
    if not args.tol > 0:
        raise _UsageError("tol must be > 0")
    if args.subcommand == "report" and args.beta is None:
        raise _UsageError("report needs --beta")
    if args.beta is not None and not 0.0 <= args.beta <= 1.0:
        raise _UsageError("beta must lie in [0, 1]")


def _report_lines(args) -> list[str]:
    r = run(args.pipeline, args.machine, args.beta)
    lines = [f"pipeline: {r.pipeline.title}", f"machine: {r.machine}", f"beta: {_fmt(r.beta)}"]
    for stage in r.stages:
        c = stage.coherence
        lines += [
            f"{stage.label}.global: {_fmt(c.global_)}",
            f"{stage.label}.local_a: {_fmt(c.local_a)}",
            f"{stage.label}.local_b: {_fmt(c.local_b)}",
            f"{stage.label}.residual: {_fmt(c.residual)}",
        ]
    lines += [f"delta_c: {_fmt(r.delta_c)}", f"delta_residual: {_fmt(r.delta_residual)}",
              f"fidelity: {_fmt(r.fidelity)}"]
    if r.fidelity_closed_form is not None:
        lines.append(f"fidelity_closed_form: {_fmt(r.fidelity_closed_form)}")
    if r.deletion_fidelity is not None:
        lines.append(f"deletion_fidelity: {_fmt(r.deletion_fidelity)}")
    return lines


def _execute(args, out) -> int:
    if args.subcommand == "sweep":
        emit_csv(sweep(args.pipeline, args.machine, args.grid), out)
    elif args.subcommand == "thresholds":
        lo, hi = consumption_interval(args.pipeline, args.machine, tol=args.tol)
        print(f"{_fmt(lo)} {_fmt(hi)}", file=out)
    elif args.subcommand == "verify":
        report = verify_all(args.machine, np.linspace(0.0, 1.0, args.grid), tol=args.tol)
        print(f"max_deviation: {_fmt(report.max_deviation)}", file=out)
        if not report.passed:
            print(f"error: {len(report.failures)} coefficient check(s) exceed tol {args.tol:g}", file=sys.stderr)
            return 2
    else:
        print("\n".join(_report_lines(args)), file=out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
    except _UsageError as exc:
        print(f"clonecoh: error: {exc}", file=sys.stderr)
        return 1
    try:
        with contextlib.ExitStack() as stack:
            out = sys.stdout if args.out == "-" else stack.enter_context(open(args.out, "w", encoding="utf-8", newline=""))
            return _execute(args, out)
    except (IsometryViolation, NoRoot) as exc:
        print(f"clonecoh: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"clonecoh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
