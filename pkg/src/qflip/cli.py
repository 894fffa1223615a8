"""Command-line interface: ``qflip <command> ...``.

Exit codes: 0 success / Verified, 1 Violation or reversed ordering,
2 input error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import coinduct, montecarlo, orbit, solve
from .errors import NoCycleFound, NotFound, QflipError
from .process import Family, make_builtin
from .serialize import (decimal_text, dumps, parse_rational, rational_text,
                        recurrence_from_config, report_to_json, spec_from_json)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _rat(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _recurrence(args, family_attr="family", config_attr="config"):
    family = getattr(args, family_attr, None)
    config = getattr(args, config_attr, None)
    if config:
        return recurrence_from_config(_load_json(config))
    if family is None:
        raise InputError("one of --family or --config is required")
    if args.p is None:
        raise InputError("--p is required with --family")
    return make_builtin(family, args.p, getattr(args, "c", None))


def _write_atomic(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".qflip-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out=None) -> None:
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    rec = _recurrence(args)
    if args.exact:
        try:
            fv = orbit.forced_value(rec, args.q, args.max_steps)
        except NoCycleFound as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        _emit(f"{rational_text(fv.value)}\n"
              f"decimal (display only): {decimal_text(fv.value)}\n")
        return EXIT_OK
    cv = solve.series_eval(rec, args.q, args.eps)
    _emit(f"lower: {rational_text(cv.lower)}\n"
          f"upper: {rational_text(cv.upper)}\n"
          f"terms: {cv.terms_used}\n"
          f"decimal (display only): [{decimal_text(cv.lower)}, {decimal_text(cv.upper)}]\n")
    return EXIT_OK


def cmd_orbit(args) -> int:
    rec = _recurrence(args)
    rep = orbit.orbit_trace(rec, args.q, args.max_steps)
    _emit(dumps({
        "points": [rational_text(x) for x in rep.points],
        "cycle_entry": rep.cycle_entry,
        "cycle_length": rep.cycle_length,
        "classification": rep.classification.value,
    }) + "\n")
    return EXIT_OK if rep.has_cycle else EXIT_BUDGET


def cmd_verify(args) -> int:
    if args.spec_file:
        data = _load_json(args.spec_file)
        spec = spec_from_json(data["spec"] if "spec" in data else data)
        if "recurrences" not in data:
            raise InputError("spec file needs a 'recurrences' list")
        recs = tuple(recurrence_from_config(r) for r in data["recurrences"])
    else:
        if args.spec is None or not args.spec.startswith("builtin:"):
            raise InputError("--spec must be builtin:<name> (or use --spec-file)")
        if args.p is None:
            raise InputError("--p is required with a builtin spec")
        try:
            spec, recs = coinduct.builtin_pipeline(args.spec[len("builtin:"):], args.p, args.c)
        except KeyError as exc:
            raise InputError(str(exc)) from exc
    rep = coinduct.verify(spec, recs, args.n)
    _emit(dumps(report_to_json(rep)) + "\n")
    return EXIT_OK if rep.verified else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    heads, flips = montecarlo.estimate_both(args.variant, args.p, args.q, args.trials,
                                            args.seed, args.workers)
    _emit(dumps({
        "heads_mean": heads.mean, "heads_stderr": heads.stderr,
        "flips_mean": flips.mean, "flips_stderr": flips.stderr,
        "trials": args.trials, "seed": args.seed,
    }) + "\n")
    return EXIT_OK


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_plot(args) -> int:
    rec = _recurrence(args)
    rows = solve.plot_series(rec, args.points, args.eps, refine=args.refine)
    body = [[rational_text(q), rational_text(lo), rational_text(hi),
             decimal_text(q), decimal_text(lo), decimal_text(hi)] for q, lo, hi in rows]
    _emit(_csv(["q", "lower", "upper", "q_decimal", "lower_decimal", "upper_decimal"], body),
          args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    rec_a = make_builtin(args.a, args.p, args.c)
    rec_b = make_builtin(args.b, args.p, args.c)
    if args.q_list:
        qs = [parse_rational(t) for t in args.q_list.split(",") if t.strip()]
    else:
        qs = solve.plot_grid(rec_a, args.points)
    rows = solve.compare_strategies(rec_a, rec_b, qs, args.eps)
    body = []
    for row in rows:
        a, b = row.a_value, row.b_value
        body.append([rational_text(row.q), rational_text(a.lower), rational_text(a.upper),
                     rational_text(b.lower), rational_text(b.upper), row.verdict.value,
                     decimal_text(row.q), decimal_text(a.lower), decimal_text(a.upper),
                     decimal_text(b.lower), decimal_text(b.upper)])
    header = ["q", "a_lower", "a_upper", "b_lower", "b_upper", "verdict",
              "q_decimal", "a_lower_decimal", "a_upper_decimal",
              "b_lower_decimal", "b_upper_decimal"]
    _emit(_csv(header, body), args.out)
    reversed_ = any(r.verdict is solve.Verdict.B_BELOW_A for r in rows)
    return EXIT_VIOLATION if reversed_ else EXIT_OK


def cmd_discont(args) -> int:
    rec = _recurrence(args)
    try:
        w = solve.find_discontinuity_in(rec, args.lo, args.hi, args.budget)
    except NotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    _emit(dumps({
        "q": rational_text(w.point), "gap": rational_text(w.gap),
        "steps": w.steps, "breakpoint": rational_text(w.breakpoint),
        "q_decimal": decimal_text(w.point), "gap_decimal": decimal_text(w.gap),
    }) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    families = [f.value for f in Family]
    parser = argparse.ArgumentParser(prog="qflip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def rec_opts(sp, config=True):
        sp.add_argument("--family", choices=families)
        if config:
            sp.add_argument("--config", help="JSON recurrence config")
        sp.add_argument("--p", type=_rat)
        sp.add_argument("--c", type=_rat, help="E3 breakpoint")

    sp = sub.add_parser("eval", help="certified value of the bounded fixpoint")
    rec_opts(sp)
    sp.add_argument("--q", type=_rat, required=True)
    sp.add_argument("--eps", type=_rat, default=solve.DEFAULT_EPS)
    sp.add_argument("--exact", action="store_true", help="exact forced value on a cycle")
    sp.add_argument("--max-steps", type=int, default=orbit.DEFAULT_MAX_STEPS)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("orbit", help="trace q, f(q), ... and detect a cycle")
    rec_opts(sp)
    sp.add_argument("--q", type=_rat, required=True)
    sp.add_argument("--max-steps", type=int, default=orbit.DEFAULT_MAX_STEPS)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("verify", help="run the coinduction verifier")
    sp.add_argument("--spec", help="builtin:E1_le_E0 | builtin:pair_E3_le_E1")
    sp.add_argument("--spec-file")
    sp.add_argument("--p", type=_rat)
    sp.add_argument("--c", type=_rat)
    sp.add_argument("--n", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates of heads and flips")
    sp.add_argument("--variant", type=int, choices=[0, 1, 2], required=True)
    sp.add_argument("--p", type=_rat, required=True)
    sp.add_argument("--q", type=_rat, required=True)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("plot", help="CSV of certified enclosures on a grid")
    rec_opts(sp)
    sp.add_argument("--points", type=int, default=2048)
    sp.add_argument("--eps", type=_rat, default=Fraction(1, 10**6))
    sp.add_argument("--refine", action="store_true",
                    help="add breakpoints and three generations of preimages")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("compare", help="certified pointwise comparison of two families")
    sp.add_argument("--a", choices=families, required=True)
    sp.add_argument("--b", choices=families, required=True)
    sp.add_argument("--p", type=_rat, required=True)
    sp.add_argument("--c", type=_rat)
    sp.add_argument("--points", type=int, default=65)
    sp.add_argument("--q-list", help="comma-separated rationals")
    sp.add_argument("--eps", type=_rat, default=Fraction(1, 10**6))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("discont", help="find a certified discontinuity in (lo, hi)")
    rec_opts(sp)
    sp.add_argument("--lo", type=_rat, required=True)
    sp.add_argument("--hi", type=_rat, required=True)
    sp.add_argument("--budget", type=int)
    sp.set_defaults(func=cmd_discont)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, QflipError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
