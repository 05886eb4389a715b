"""Command line entry point: ``sumdilates <subcommand> ...``.

Outputs are deterministic for a fixed command line (seeds included), and
go to ``--out`` or stdout. Exit status: 0 success, 1 usage or domain error,
2 when a ``verify`` run finds a violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction

from . import bounds, circle, construct, oracle, structure
from .errors import DomainError, EmptySetError, NotPrimeError, SetFileError, SumDilatesError
from .zp import DilateVector, check_prime, dilate_sum, format_set, parse_set

DEFAULT_ALPHAS = "0,1/100,1/20,1/10,1/5,3/10,2/5,49/100"
DEFAULT_LAMBDAS = "2,3,4,5,10,100"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def rational(text: str) -> Fraction:
    """An integer or 'num/den'; decimal notation is refused to keep values exact."""
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError(f"{text!r} is not an exact rational (use num/den)")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational 'num/den'") from None


def int_list(text: str) -> list[int]:
    """Comma list of integers; 'a-b' expands to the inclusive range."""
    out = []
    for tok in text.split(","):
        m = re.fullmatch(r"\s*(-?\d+)\s*(?:-\s*(-?\d+)\s*)?", tok)
        if not m:
            raise argparse.ArgumentTypeError(f"{tok!r} is not an integer or range")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) is not None else lo
        out.extend(range(lo, hi + 1))
    return out


def dilates(text: str) -> DilateVector:
    try:
        return DilateVector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise SetFileError(f"cannot read {path}: {exc.strerror}") from None


def _read_set(path: str):
    return parse_set(_read_text(path))


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[dict], columns: list[str], provenance: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in provenance.items()) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({c: row[c] for c in columns})
    return buf.getvalue()


def _fmt_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


# -- subcommands ---------------------------------------------------------


def cmd_sumset(args) -> int:
    A = _read_set(args.set)
    if not A:
        raise EmptySetError("input set is empty")
    S = dilate_sum(A, args.lambdas)
    report = bounds.bound_report(A, args.lambdas, measure=False)
    report.actual = S.card
    if args.format == "json":
        doc = {"p": A.p, "lambdas": str(args.lambdas), "sumset": list(S), "report": report.as_dict()}
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        header = {k: _fmt_value(v) for k, v in report.as_dict().items() if k != "p"}
        _emit(args, format_set(S, header))
    return 0


def cmd_diameter(args) -> int:
    A = _read_set(args.set)
    l, w = structure.diameter(A)
    _emit(args, f"p={A.p} size={A.card} diameter={l}\n{w}\n")
    return 0


def cmd_rectify(args) -> int:
    A = _read_set(args.set)
    lift = structure.rectify(A, args.M)
    lines = [f"# p={A.p} M={args.M} {lift.witness}", " ".join(map(str, lift.elements))]
    if args.lambdas is not None:
        lines.insert(1, f"# lambdas={args.lambdas} int_sumset={structure.int_dilate_sum(lift, args.lambdas)}"
                        f" zp_sumset={dilate_sum(A, args.lambdas).card}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_construct_cycle(args) -> int:
    res = construct.cycle_construction(args.p, args.l1, args.l2)
    S = dilate_sum(res.set, (args.l1, args.l2))
    header = {
        "construction": "cycle",
        "l1": args.l1,
        "l2": args.l2,
        "k": res.k,
        "size": res.set.card,
        "sumset_size": S.card,
    }
    _emit(args, format_set(res.set, header))
    return 0


def _rokhlin_params(args):
    if (args.m is None) != (args.t is None):
        raise UsageError("--m and --t must be given together")
    if args.m is not None:
        return construct.ConstructionParams(args.lam, args.m, args.t, args.epsilon)
    return None


def cmd_construct_rokhlin(args) -> int:
    params = _rokhlin_params(args)
    if args.circle:
        if params is None:
            params = construct.choose_params(args.lam, args.epsilon)
        S = construct.rokhlin_set(params, cap=args.cap)
        head = " ".join(f"{k}={v}" for k, v in params.header().items())
        _emit(args, f"# {head} measure={circle.measure(S)} intervals={len(S)}\n" + circle.format_intervals(S))
        return 0
    if args.p is None:
        raise UsageError("construct rokhlin needs --p (or --circle)")
    res = construct.construct_zp(args.lam, args.epsilon, args.p, params=params, window=args.window)
    _emit(args, format_set(res.set, res.header()))
    return 0


def cmd_discretize(args) -> int:
    S = circle.parse_intervals(_read_text(args.intervals))
    A = circle.discretize(S, args.p)
    _emit(args, format_set(A, {"measure": circle.measure(S), "intervals": len(S)}))
    return 0


def cmd_bounds(args) -> int:
    lams = args.lambdas
    alphas = args.alphas
    for a in alphas:
        if not 0 <= a < Fraction(1, 2):
            raise DomainError(f"alpha must lie in [0, 1/2), got {a}")
    rows = []
    for lam in lams:
        for a in alphas:
            row = bounds.bounds_table([lam], [float(a)])[0]
            row["alpha"] = str(a)
            row["plagne_f"] = f"{row['plagne_f']:.9f}"
            row["cd_ratio"] = f"{row['cd_ratio']:.9f}"
            rows.append(row)
    cols = ["lambda", "alpha", "plagne_f", "bukh_main_ratio", "cd_ratio"]
    _emit(args, _csv(rows, cols, {"command": "bounds"}))
    return 0


EXTREMAL_COLUMNS = ["p", "k", "lambdas", "size", "min_sumset", "ratio", "mode", "witness"]


def cmd_extremal(args) -> int:
    check_prime(args.p)
    rows = []
    for size in args.sizes:
        if args.mode == "exhaustive":
            rec = oracle.exhaustive_ex(args.p, args.lambdas, size, budget=args.budget, workers=args.workers)
        else:
            rec = oracle.randomized_ex(args.p, args.lambdas, size, args.iterations, seed=args.seed)
        rows.append(rec.row())
    prov = {"command": f"extremal-{args.mode}", "p": args.p, "lambdas": str(args.lambdas)}
    if args.mode == "random":
        prov.update(iterations=args.iterations, seed=args.seed)
    _emit(args, _csv(rows, EXTREMAL_COLUMNS, prov))
    return 0


def cmd_verify(args) -> int:
    if args.suite == "cd":
        rep = oracle.cd_suite(args.p, seed=args.seed)
    elif args.suite == "vosper":
        rep = oracle.vosper_suite(args.p)
    elif args.suite == "ruzsa":
        rep = oracle.ruzsa_suite(args.p, args.trials, seed=args.seed, lambdas=args.lambdas)
    else:
        rep = oracle.tower_suite(nus=tuple(args.nus), ms=tuple(args.ms), levels=args.levels)
    lines = [f"{rep.name}: {rep.summary()}"]
    for k, v in rep.extra.items():
        lines.append(f"  {k}={v}")
    for ex in rep.examples:
        lines.append(f"  counterexample: {ex}")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if rep.ok else 2


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sumdilates", description="Sums of dilates in Z_p and on the circle.")
    parser.add_argument("--workers", type=int, default=1, help="process pool size for exhaustive search (default 1)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="subcommand")
    sub.required = True

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output path (default stdout)")
        return sp

    sp = add("sumset", cmd_sumset, "sum of dilates of a set file, with bounds")
    sp.add_argument("set", help="set file ('-' for stdin)")
    sp.add_argument("--lambdas", type=dilates, default=DilateVector((1, 1)), help="comma list (default 1,1)")
    sp.add_argument("--format", choices=("set", "json"), default="set")

    sp = add("diameter", cmd_diameter, "shortest progression containing a set")
    sp.add_argument("set")

    sp = add("rectify", cmd_rectify, "lift a small-diameter set to the integers")
    sp.add_argument("set")
    sp.add_argument("--M", type=int, default=2, help="Freiman order to preserve (default 2)")
    sp.add_argument("--lambdas", type=dilates, help="also compare |sum of dilates| over Z and Z_p")

    sp = sub.add_parser("construct", help="extremal constructions")
    csub = sp.add_subparsers(dest="kind", parser_class=_Parser, metavar="kind")
    csub.required = True
    cp = csub.add_parser("cycle", help="alternating vertices of the r-cycles")
    cp.set_defaults(func=cmd_construct_cycle)
    cp.add_argument("--out")
    cp.add_argument("--p", type=int, required=True)
    cp.add_argument("--l1", type=int, required=True)
    cp.add_argument("--l2", type=int, required=True)
    rp = csub.add_parser("rokhlin", help="large set A with A + lambda*A missing a window")
    rp.set_defaults(func=cmd_construct_rokhlin)
    rp.add_argument("--out")
    rp.add_argument("--lambda", dest="lam", type=int, required=True)
    rp.add_argument("--epsilon", type=rational, required=True, help="rational in (0, 1/2), e.g. 1/4")
    rp.add_argument("--p", type=int)
    rp.add_argument("--m", type=int, help="tower scale (with --t; default: fitted)")
    rp.add_argument("--t", type=int, help="tower height (with --m)")
    rp.add_argument("--window", type=int, help="pruning half-width (default: fitted, or 1 with --m/--t)")
    rp.add_argument("--circle", action="store_true", help="emit the circle set as intervals instead")
    rp.add_argument("--cap", type=int, default=construct.DEFAULT_INTERVAL_CAP, help="interval cap for --circle")

    sp = add("discretize", cmd_discretize, "points x of Z_p with x/p in an interval file")
    sp.add_argument("intervals")
    sp.add_argument("--p", type=int, required=True)

    sp = add("bounds", cmd_bounds, "CSV of Plagne's f against the Bukh and CD ratios")
    sp.add_argument("--lambdas", type=int_list, default=int_list(DEFAULT_LAMBDAS))
    sp.add_argument("--alphas", type=lambda s: [rational(x) for x in s.split(",")], default=[rational(x) for x in DEFAULT_ALPHAS.split(",")])

    sp = sub.add_parser("extremal", help="minimum sum of dilates by search")
    esub = sp.add_subparsers(dest="mode", parser_class=_Parser, metavar="mode")
    esub.required = True
    for mode in ("exhaustive", "random"):
        ep = esub.add_parser(mode)
        ep.set_defaults(func=cmd_extremal)
        ep.add_argument("--out")
        ep.add_argument("--p", type=int, required=True)
        ep.add_argument("--lambdas", type=dilates, required=True)
        ep.add_argument("--sizes", type=int_list, required=True, help="e.g. 2,3 or 2-6")
        if mode == "exhaustive":
            ep.add_argument("--budget", type=int, default=oracle.ENUMERATION_BUDGET)
        else:
            ep.add_argument("--iterations", type=int, default=20000)
            ep.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify", help="brute-force checks of the classical theorems")
    vsub = sp.add_subparsers(dest="suite", parser_class=_Parser, metavar="suite")
    vsub.required = True
    for suite in ("cd", "vosper", "ruzsa", "tower"):
        vp = vsub.add_parser(suite)
        vp.set_defaults(func=cmd_verify)
        vp.add_argument("--out")
        vp.add_argument("--seed", type=int, default=0)
        if suite != "tower":
            vp.add_argument("--p", type=int, required=True)
        if suite == "ruzsa":
            vp.add_argument("--trials", type=int, default=10000)
            vp.add_argument("--lambdas", type=dilates, default=DilateVector((1, 2)))
        if suite == "tower":
            vp.add_argument("--nus", type=int_list, default=[2, 3])
            vp.add_argument("--ms", type=int_list, default=[1, 2, 3])
            vp.add_argument("--levels", type=int, default=8)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except NotPrimeError as exc:
        print(f"error: not prime: {exc}", file=sys.stderr)
    except SetFileError as exc:
        print(f"error: unparsable input file: {exc}", file=sys.stderr)
    except EmptySetError as exc:
        print(f"error: empty set: {exc}", file=sys.stderr)
    except (SumDilatesError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
