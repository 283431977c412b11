"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse problem (including malformed or
mismatched inputs), 2 precondition failure (not complementable / not
summable / not in the subtraction domain), 3 a checked predicate is cleanly
false, 4 the verification suite reports failures.  Every report embeds the
tool version, the full invocation and the effective tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    BadAuxiliary,
    BadDims,
    ConsistencyError,
    DimensionMismatch,
    EscalationExhausted,
    NotComplementable,
    NotInDA,
    NotSummable,
    RangeNotIncluded,
)
from .genlab import GenConfig, gen_with_ranges, run_suite, trial_rng
from .minusorder import minus_leq
from .numcore import Tolerance, opnorm
from .parallel import (
    DEFAULT_SCHEDULE,
    parallel_subtract,
    parallel_sum,
    shorted_via_limit,
    summability,
)
from .serialize import (
    dumps_report,
    load_matrix,
    load_subspace,
    matrix_to_payload,
)
from .shorting import complementability, shorted

TOLERANCE_ENV = "SHORTOPS_TOL"

_TOL_HELP = (
    "comma-separated overrides of the tolerance defaults, e.g. "
    "'eq_rel=1e-8,rank_rel=1e-12,psd_slack=1e-10'; the environment variable "
    f"{TOLERANCE_ENV} supplies defaults with the same syntax"
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def parse_tolerance(text: str | None, base: Tolerance | None = None) -> Tolerance:
    tol = base or Tolerance()
    if not text:
        return tol
    overrides = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        key, sep, value = piece.partition("=")
        key = key.strip()
        if not sep or key not in ("rank_rel", "eq_rel", "psd_slack"):
            raise ValueError(f"bad tolerance override {piece!r}")
        overrides[key] = float(value)
    return dataclasses.replace(tol, **overrides)


def _effective_tolerance(args) -> Tolerance:
    tol = parse_tolerance(os.environ.get(TOLERANCE_ENV))
    return parse_tolerance(getattr(args, "tol", None), tol)


def _envelope(argv: list[str], tol: Tolerance) -> dict:
    return {
        "tool": "shortops",
        "version": __version__,
        "invocation": ["shortops", *argv],
        "tolerance": {
            "rank_rel": tol.rank_rel,
            "eq_rel": tol.eq_rel,
            "psd_slack": tol.psd_slack,
        },
    }


def _maybe_matrix(M) -> dict | None:
    return None if M is None else matrix_to_payload(M)


def _complementability_payload(report) -> dict:
    witnesses = None
    if report.witnesses is not None:
        w = report.witnesses
        witnesses = {
            "E": matrix_to_payload(w.E),
            "F": matrix_to_payload(w.F),
            "P_hat": matrix_to_payload(w.P_hat),
            "Q_hat": matrix_to_payload(w.Q_hat),
            "M_r": matrix_to_payload(w.M_r),
            "M_l": matrix_to_payload(w.M_l),
        }
    return {
        "weakly": report.weakly,
        "strongly": report.strongly,
        "angle_check": list(report.angle_check),
        "witnesses": witnesses,
    }


def _summability_payload(report) -> dict:
    d = report.defects
    return {
        "weakly": report.weakly,
        "strongly": report.strongly,
        "defects": {
            "a_range": d.a_range,
            "a_corange": d.a_corange,
            "b_range": d.b_range,
            "b_corange": d.b_corange,
        },
    }


def _shorted_payload(result) -> dict:
    d = result.diagnostics
    return {
        "shorted": matrix_to_payload(result.shorted),
        "E": matrix_to_payload(result.E),
        "F": matrix_to_payload(result.F),
        "P": matrix_to_payload(result.P),
        "Q": matrix_to_payload(result.Q),
        "diagnostics": {
            "route_disagreement": d.route_disagreement,
            "qa_ap_gap": d.qa_ap_gap,
            "qa_residual": d.qa_residual,
            "ap_residual": d.ap_residual,
        },
    }


def _emit(args, payload: dict) -> None:
    text = dumps_report(payload)
    out = getattr(args, "json_out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_short(args, tol, payload):
    A = load_matrix(args.operator)
    S = load_subspace(args.domain, tol)
    T = load_subspace(args.codomain, tol)
    result = shorted(A, S, T, tol)
    payload["result"] = _shorted_payload(result)
    return 0


def _cmd_psum(args, tol, payload):
    A = load_matrix(args.left)
    B = load_matrix(args.right)
    result = parallel_sum(A, B, tol)
    payload["result"] = {
        "sum": matrix_to_payload(result.sum),
        "route_pinv": matrix_to_payload(result.route_pinv),
        "route_reduced": matrix_to_payload(result.route_reduced),
        "route_block": matrix_to_payload(result.route_block),
        "max_route_disagreement": result.max_route_disagreement,
    }
    return 0


def _cmd_psub(args, tol, payload):
    C = load_matrix(args.minuend)
    A = load_matrix(args.subtrahend)
    X = parallel_subtract(C, A, tol)
    round_trip = opnorm(parallel_sum(A, X, tol).sum - C)
    payload["result"] = {
        "difference": matrix_to_payload(X),
        "round_trip_residual": round_trip,
    }
    return 0


def _cmd_check(args, tol, payload):
    if args.what == "complementable":
        if len(args.files) != 3:
            raise ValueError("complementable check needs A-file S-file T-file")
        A = load_matrix(args.files[0])
        S = load_subspace(args.files[1], tol)
        T = load_subspace(args.files[2], tol)
        report = complementability(A, S, T, tol)
        payload["report"] = _complementability_payload(report)
        holds = report.strongly
    elif args.what == "summable":
        if len(args.files) != 2:
            raise ValueError("summable check needs A-file B-file")
        A = load_matrix(args.files[0])
        B = load_matrix(args.files[1])
        report = summability(A, B, tol)
        payload["report"] = _summability_payload(report)
        holds = report.strongly
    else:  # minus
        if len(args.files) != 2:
            raise ValueError("minus check needs C-file B-file")
        C = load_matrix(args.files[0])
        B = load_matrix(args.files[1])
        verdict = minus_leq(C, B, tol)
        payload["report"] = {
            "holds": verdict.holds,
            "rank_route": verdict.rank_route,
            "projection_route": verdict.projection_route,
            "Q": _maybe_matrix(verdict.Q),
            "P": _maybe_matrix(verdict.P),
        }
        holds = verdict.holds
    payload["holds"] = holds
    return 0 if holds else 3


def _cmd_converge(args, tol, payload):
    A = load_matrix(args.operator)
    S = load_subspace(args.domain, tol)
    T = load_subspace(args.codomain, tol)
    if args.auxiliary is not None:
        B = load_matrix(args.auxiliary)
    else:
        B = gen_with_ranges(T, S, trial_rng(args.seed, 0, 0))
    schedule = DEFAULT_SCHEDULE
    if args.schedule:
        schedule = tuple(int(part) for part in args.schedule.split(",") if part.strip())
    record = shorted_via_limit(A, S, T, B, schedule, tol)
    payload["result"] = {
        "schedule": record.schedule,
        "errors": record.errors,
        "fitted_slope": record.fitted_slope,
        "auxiliary": matrix_to_payload(B),
    }
    return 0


def _cmd_verify(args, tol, payload):
    lo, hi = (int(part) for part in args.dims.split(","))
    config = GenConfig(
        seed=args.seed,
        dim_range=(lo, hi),
        trials=args.trials,
        condition_cap=args.condition_cap,
    )
    report = run_suite(config, tol)
    payload["report"] = report.to_dict()
    return 0 if report.total_failures == 0 else 4


def _cmd_demo_impedance(args, tol, payload):
    if args.resistors:
        if len(args.resistors) < 2:
            raise ValueError("need at least two resistances")
        operands = [np.array([[r]], dtype=np.complex128) for r in args.resistors]
    else:
        if len(args.ports) < 2:
            raise ValueError("need at least two impedance matrix files")
        operands = [load_matrix(path) for path in args.ports]
    joint = operands[0]
    for Z in operands[1:]:
        joint = parallel_sum(joint, Z, tol).sum
    payload["result"] = {
        "operands": len(operands),
        "impedance": matrix_to_payload(joint),
    }
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="shortops",
        description="Shorted operators, parallel sums and the minus order "
                    "for dense complex matrices.",
        epilog=f"Tolerances: every command accepts --tol ({_TOL_HELP}).",
    )
    parser.add_argument("--version", action="version", version=f"shortops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", default=None, help=_TOL_HELP)
        sp.add_argument("--json-out", default=None,
                        help="write the JSON report to this path instead of stdout")

    p = sub.add_parser("short", help="bilateral shorted operator of A w.r.t. (S, T)")
    p.add_argument("operator", help="matrix JSON file for A")
    p.add_argument("domain", help="subspace JSON file for S (domain side)")
    p.add_argument("codomain", help="subspace JSON file for T (codomain side)")
    common(p)

    p = sub.add_parser("psum", help="parallel sum of two operators")
    p.add_argument("left")
    p.add_argument("right")
    common(p)

    p = sub.add_parser("psub", help="parallel subtraction C div A")
    p.add_argument("minuend", help="matrix JSON file for C")
    p.add_argument("subtrahend", help="matrix JSON file for A")
    common(p)

    p = sub.add_parser("check", help="run a predicate and report it")
    p.add_argument("files", nargs="+", help="operand files (count depends on --what)")
    p.add_argument("--what", required=True,
                   choices=("complementable", "summable", "minus"))
    common(p)

    p = sub.add_parser("converge", help="approximate the shorted operator by A || nB")
    p.add_argument("operator")
    p.add_argument("domain")
    p.add_argument("codomain")
    p.add_argument("auxiliary", nargs="?", default=None,
                   help="optional matrix file for B (default: generated from --seed)")
    p.add_argument("--schedule", default=None,
                   help="comma-separated n values (default geometric 1..65536)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the generated auxiliary operator")
    common(p)

    p = sub.add_parser("verify", help="run the randomized invariant suite")
    p.add_argument("--seed", type=int, default=GenConfig.seed)
    p.add_argument("--trials", type=int, default=GenConfig.trials)
    p.add_argument("--dims", default="2,8", help="dimension window 'lo,hi'")
    p.add_argument("--condition-cap", type=float, default=GenConfig.condition_cap)
    common(p)

    p = sub.add_parser("demo-impedance",
                       help="impedance of a parallel connection of n-ports")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--resistors", nargs="+", type=float, default=None)
    group.add_argument("--ports", nargs="+", default=None,
                       help="matrix JSON files with port impedances")
    common(p)

    return parser


_HANDLERS = {
    "short": _cmd_short,
    "psum": _cmd_psum,
    "psub": _cmd_psub,
    "check": _cmd_check,
    "converge": _cmd_converge,
    "verify": _cmd_verify,
    "demo-impedance": _cmd_demo_impedance,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"shortops: {exc}", file=sys.stderr)
        return 1

    try:
        tol = _effective_tolerance(args)
    except ValueError as exc:
        print(f"shortops: {exc}", file=sys.stderr)
        return 1

    payload = _envelope(argv, tol)
    try:
        code = _HANDLERS[args.command](args, tol, payload)
    except NotComplementable as exc:
        payload["error"] = "not-complementable"
        payload["report"] = _complementability_payload(exc.report)
        _emit(args, payload)
        print("shortops: operator is not complementable w.r.t. (S, T)", file=sys.stderr)
        return 2
    except NotSummable as exc:
        payload["error"] = "not-summable"
        payload["report"] = _summability_payload(exc.report)
        _emit(args, payload)
        print("shortops: operators are not parallel summable", file=sys.stderr)
        return 2
    except (NotInDA, BadAuxiliary, EscalationExhausted,
            RangeNotIncluded, ConsistencyError) as exc:
        payload["error"] = type(exc).__name__
        _emit(args, payload)
        print(f"shortops: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError,
            DimensionMismatch, BadDims) as exc:
        print(f"shortops: {exc}", file=sys.stderr)
        return 1
    _emit(args, payload)
    return code


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
