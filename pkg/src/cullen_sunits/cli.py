"""Command-line entry point.

Exit codes: 0 ok, 1 mismatch, 2 usage error, 3 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import bounds, lifting, recurrence, search, verify
from .cache import Cache, resolve_dir
from .errors import InternalContradiction
from .padic_core import SmoothnessBasis

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Accept plain decimals and exact scientific notation such as ``1e66``."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_sequence(text: str) -> recurrence.TernaryRecurrence:
    if text == "cullen":
        return recurrence.cullen()
    if text == "woodall":
        return recurrence.woodall()
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 6:
            raise UsageError("custom sequence needs r1,r2,r3,u0,u1,u2")
        return recurrence.make_recurrence(*(int(x) for x in parts))
    raise UsageError(f"unknown sequence {text!r}")


def emit(args, payload, lines):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- subcommands ---------------------------------------------------------------


def cmd_lift(args, cache):
    target = lifting.LiftTarget(args.p, args.t_prime)
    if args.k is not None:
        sols = lifting.solutions_mod_prime_power(target, args.k)
        payload = {"p": str(args.p), "tPrime": str(args.t_prime), "k": str(args.k),
                   "modulus": str((args.p - 1) * args.p**args.k), "solutions": [str(n) for n in sols]}
        emit(args, payload, [f"n 2^n = {args.t_prime} mod {args.p}^{args.k}: "
                             f"n mod {payload['modulus']} in {{{', '.join(map(str, sols))}}}"])
        return EXIT_OK
    if args.N is None:
        raise UsageError("lift needs --N or --k")
    resume = None
    if args.resume:
        saved, resume = lifting.load_checkpoint(args.resume)
        if saved != target:
            raise UsageError("checkpoint was written for a different target")
    result = lifting.valuation_ceiling(target, args.N, resume)
    path = cache.path("lift", {"p": args.p, "tPrime": args.t_prime})
    if cache.enabled:
        path.parent.mkdir(parents=True, exist_ok=True)
        lifting.dump_checkpoint(target, [b.chain for b in result.per_base], path)
    payload = result.to_json()
    payload["checkpoint"] = str(path) if cache.enabled else None
    lines = [f"p = {args.p}, t' = {args.t_prime}, N = {args.N}",
             f"J = {result.J}  (nu_p(n 2^n - t') <= {result.J} for n <= N)"]
    lines += [f"  n0 = {b.n0}: n_{result.J} = {n}" for b, n in zip(result.per_base, result.terminal)]
    emit(args, payload, lines)
    return EXIT_OK


def cmd_bounds(args, cache):
    rec = parse_sequence(args.sequence)
    const = bounds.all_constants(args.k, args.A, args.P, rec, dps=args.precision)
    rows = const.table()
    payload = {"sequence": args.sequence, "k": str(args.k), "A": str(args.A), "P": str(args.P),
               "dps": str(args.precision),
               "constants": [{"name": n, "formula": f, "value": v, "rounding": r} for n, f, v, r in rows]}
    width = max(len(f) for _, f, _, _ in rows)
    lines = [f"{args.sequence}: k={args.k} A={args.A} P={args.P} (Y={rec.Y}, gamma={rec.gamma})"]
    lines += [f"{n:>3}  {f:<{width}}  {v}  [{r}]" for n, f, v, r in rows]
    emit(args, payload, lines)
    return EXIT_OK


def cmd_search(args, cache):
    basis = SmoothnessBasis(args.basis)
    sols = search.solve_cullen(args.n_max, args.m1_max, basis)
    payload = {"nMax": str(args.n_max), "m1Max": str(args.m1_max), "solutions": [s.to_json() for s in sols]}
    lines = []
    for s in sols:
        tag = "degenerate" if s.degenerate else "non-degenerate"
        lines.append(f"[{s.n}, {', '.join(map(str, s.ms))}, {s.s}]  {tag}")
    emit(args, payload, lines)
    return EXIT_OK


def cmd_scan(args, cache):
    if args.nu11:
        lo = args.lo if args.lo is not None else search.NU11_LO
        hi = args.hi if args.hi is not None else search.NU11_HI

        def compute():
            l11, l13 = search.scan_nu11_case(lo, hi)
            return {"nLo": str(lo), "nHi": str(hi), "list11": [str(n) for n in l11],
                    "list13": [str(n) for n in l13]}

        payload = cache.cached("nu11", {"lo": lo, "hi": hi}, compute)
        emit(args, payload, [f"nu_11(C_n - s) >= 4 at: {', '.join(payload['list11']) or 'none'}",
                             f"of these nu_13(C_n - s) >= 3 at: {', '.join(payload['list13']) or 'none'}"])
        return EXIT_OK
    if args.p is None:
        raise UsageError("scan needs --p (or --nu11)")
    lo = args.lo if args.lo is not None else 1
    hi = args.hi if args.hi is not None else verify.SCAN_HI
    t = args.t
    builder = search._zero if t == 0 else _Constant(t)
    params = {"p": args.p, "lo": lo, "hi": hi, "t": t}
    if args.cap is None and args.threshold is None:
        payload = cache.cached("scan", params, lambda: search.scan_valuation(
            args.p, builder, lo, hi, jobs=args.jobs).to_json())
    else:
        payload = search.scan_valuation(args.p, builder, lo, hi, args.cap, args.threshold,
                                        jobs=args.jobs).to_json()
    lines = [f"max nu_{args.p}(C_n - {t}) over [{lo}, {hi}] = {payload['max']} "
             f"at n = {', '.join(payload['argmax'])}"]
    if args.threshold is not None:
        lines.append(f"n with valuation >= {args.threshold}: {len(payload['hits'])}")
    if payload["zeros"]:
        lines.append(f"exact zeros (infinite valuation): {', '.join(payload['zeros'])}")
    emit(args, payload, lines)
    return EXIT_OK


class _Constant:
    # picklable constant t_builder for worker processes
    def __init__(self, t):
        self.t = t

    def __call__(self, n):
        return self.t


def cmd_woodall(args, cache):
    got = search.woodall_check(args.n_max)
    payload = {"nMax": str(args.n_max), "solutions": [[str(n), str(s)] for n, s in got],
               "note": verify.WOODALL_SLICE}
    lines = [f"W_n = 1! + s for n <= {args.n_max}: " + (", ".join(f"n={n}, s={s}" for n, s in got) or "none"),
             verify.WOODALL_SLICE]
    emit(args, payload, lines)
    return EXIT_OK


def _report_path(cache: Cache, profile: str) -> Path:
    return cache.directory / f"verify-{profile}.json"


def _render(report) -> list:
    lines = [f"profile {report['profile']}, working bound {report['workingBound']}, c5 = {report['c5']}"]
    for r in report["checks"]:
        lines.append(f"{r['id']:<12} {r['status']:<24} {r['runtimeSeconds']:>8.3f}s  {r['paperLocation']}")
        if r["notes"]:
            lines.append(f"{'':<12} {r['notes']}")
    lines.append(f"open case: {report['residualGap']}")
    lines.append(f"Woodall: {report['woodallSlice']}")
    return lines


def cmd_verify(args, cache):
    only = set(args.only) if args.only else None
    report = verify.run_verify(args.profile, cache, jobs=args.jobs, only=only)
    if cache.enabled:
        cache.directory.mkdir(parents=True, exist_ok=True)
        with open(_report_path(cache, args.profile), "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    emit(args, report, _render(report))
    return verify.exit_status(report)


def cmd_report(args, cache):
    path = Path(args.path) if args.path else _report_path(cache, args.profile)
    try:
        with open(path) as fh:
            report = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no verify report at {path}; run `verify` first")
    emit(args, report, _render(report))
    return verify.exit_status(report)


# --- parser --------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with SUPPRESS defaults so that a flag
    # given before the subcommand is not reset by the subparser
    d = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    common.add_argument("--jobs", type=int, default=d(1), metavar="N", help="worker processes")
    common.add_argument("--cache-dir", default=d(None), metavar="PATH",
                        help="cache location (CACHE_DIR overrides)")
    common.add_argument("--no-cache", action="store_true", default=d(False),
                        help="neither read nor write the cache")
    common.add_argument("--precision", type=int, default=d(bounds.DEFAULT_DPS), metavar="DIGITS",
                        help="decimal digits for interval evaluation (default 50)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="cullen-sunits", parents=[_global_flags(suppress=False)],
        description="Valuations, lifting, bound constants and searches for C_n = m1! + m2! + s.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", parents=[common], help="lift n 2^n = t' to higher powers of p",
                       epilog="example: lift --p 3 --t-prime=-1 --N 1e66")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--t-prime", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--N", type=parse_int, help="index bound, e.g. 1e66")
    g.add_argument("--k", type=int, help="list the solutions modulo (p-1) p^k")
    p.add_argument("--resume", metavar="FILE", help="checkpoint from an earlier lift")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("bounds", parents=[common], help="effective constants c1..c7, n0, n1",
                       epilog="example: bounds --k 2 --A 1 --P 7 --sequence cullen")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=int, default=1)
    p.add_argument("--P", type=int, default=7)
    p.add_argument("--sequence", default="cullen", help="cullen, woodall or custom:r1,r2,r3,u0,u1,u2")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("search", parents=[common], help="solve C_n = m1! + m2! + s",
                       epilog="example: search --n-max 1000 --m1-max 60")
    p.add_argument("--n-max", type=parse_int, default=1000)
    p.add_argument("--m1-max", type=int, default=60)
    p.add_argument("--basis", type=int, nargs="+", default=[2, 3, 5, 7])
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("scan", parents=[common], help="maximum of nu_p(C_n - t) over a range",
                       epilog="examples: scan --p 3 ; scan --nu11")
    p.add_argument("--p", type=int)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--lo", type=parse_int)
    p.add_argument("--hi", type=parse_int)
    p.add_argument("--cap", type=int, help="initial valuation cap")
    p.add_argument("--threshold", type=int, help="also list n with valuation >= this")
    p.add_argument("--nu11", action="store_true", help="the nu_11 / nu_13 check for m2 >= 49")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("woodall", parents=[common], help="W_n - 1 as an S-unit",
                       epilog="example: woodall --n-max 10000")
    p.add_argument("--n-max", type=parse_int, default=10**4)
    p.set_defaults(func=cmd_woodall)

    p = sub.add_parser("verify", parents=[common], help="reproduce every published computation")
    p.add_argument("--profile", choices=("quick", "full"), default="full")
    p.add_argument("--only", nargs="+", metavar="ID", help="run only these check ids")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="print a saved verify report")
    p.add_argument("path", nargs="?")
    p.add_argument("--profile", choices=("quick", "full"), default="full")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    cache = Cache(resolve_dir(args.cache_dir), enabled=not args.no_cache)
    try:
        return args.func(args, cache)
    except (InternalContradiction, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
