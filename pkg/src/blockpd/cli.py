"""Command line front end.

Exit codes: 0 affirmative/success, 1 negative result or property failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .instance import InstanceError, load_instance
from .oracle import eigen_curve
from .pdanalysis import NoPdIntervalError, cs_sufficient_interval, decide_pd, pd_interval
from .verify import format_report, run_properties

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _g(x: float) -> str:
    return f"{x:.6g}"


def _load(path: str, c_override: Optional[float] = None):
    inst = load_instance(path)
    try:
        return inst, inst.to_params(c_override)
    except ValueError as exc:
        raise InstanceError(path, None, str(exc)) from None


def cmd_check(args, out) -> int:
    _, params = _load(args.instance, args.c)
    verdict = decide_pd(params)
    if args.format == "structured":
        json.dump({"pd": verdict.pd, "alphas": list(verdict.alphas),
                   "criterion": verdict.criterion}, out)
        out.write("\n")
    else:
        out.write(f"PD: {'true' if verdict.pd else 'false'}\n")
        out.write("alpha: " + ", ".join(_g(a) for a in verdict.alphas) + "\n")
        out.write(f"criterion: {verdict.criterion}\n")
    return EXIT_OK if verdict.pd else EXIT_NEGATIVE


def cmd_interval(args, out) -> int:
    inst, params = _load(args.instance)
    if not inst.is_iso:
        raise UsageError("interval needs a common between-group correlation ('c', not 'c_table')")
    if params.groups.p < 2:
        raise UsageError("interval needs at least two groups")
    try:
        iv = pd_interval(params)
    except NoPdIntervalError as exc:
        out.write(f"no PD interval: {exc}\n")
        return EXIT_NEGATIVE
    suff = cs_sufficient_interval(params)
    if args.format == "structured":
        json.dump({
            "lower": iv.lower,
            "upper": iv.upper,
            "lower_is_closed_form": iv.lower_is_closed_form,
            "upper_is_closed_form": iv.upper_is_closed_form,
            "bracket": list(iv.bracket),
            "sufficient": list(suff),
        }, out)
        out.write("\n")
    else:
        out.write(f"PD interval: {_g(iv.lower)} < c < {_g(iv.upper)}\n")
        out.write(f"lower: {iv.lower!r}\n")
        out.write(f"upper: {iv.upper!r}\n")
        out.write(f"sufficient (min-alpha CS bound): {_g(suff[0])} < c < {_g(suff[1])}\n")
    return EXIT_OK


def cmd_curve(args, out) -> int:
    inst, params = _load(args.instance)
    if not inst.is_iso:
        raise UsageError("curve needs a common between-group correlation ('c', not 'c_table')")
    if not -1.0 < args.c_min < args.c_max < 1.0:
        raise UsageError("need -1 < c-min < c-max < 1")
    if args.steps < 2:
        raise UsageError("steps must be >= 2")
    curve = eigen_curve(params, args.c_min, args.c_max, args.steps)
    if args.out == "-":
        curve.write_csv(out)
        report = sys.stderr
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                curve.write_csv(fh)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        report = out
    for column in ("lambda_full", "lambda_avg"):
        changes = curve.sign_changes(column)
        if not changes:
            report.write(f"{column}: no sign change\n")
        for i, j in changes:
            report.write(f"{column}: sign change between c={_g(curve.c_values[i])} "
                         f"and c={_g(curve.c_values[j])}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    if args.seed < 0:
        raise UsageError("seed must be >= 0")
    results = run_properties(args.seed, args.trials)
    out.write(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockpd",
        description="Positive definiteness of block correlation matrices with CS diagonal blocks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(choices=("human", "structured"), default="human")

    p = sub.add_parser("check", help="decide positive definiteness of an instance")
    p.add_argument("instance")
    p.add_argument("--c", type=float, help="override with a common between-group correlation")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("interval", help="PD interval of the common between-group correlation")
    p.add_argument("instance")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_interval)

    p = sub.add_parser("curve", help="smallest eigenvalue of A and of its block average along c")
    p.add_argument("instance")
    p.add_argument("--c-min", type=float, default=-0.4)
    p.add_argument("--c-max", type=float, default=0.6)
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--out", default="-", help="CSV output path ('-' for stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="randomized self-check of the invariants")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (InstanceError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
