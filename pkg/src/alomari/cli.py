"""Command-line entry point: ``alomari <subcommand> ...``.

Exit codes: 0 success, 1 violations found, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .bounds import theorem5_report
from .errors import AlomariError
from .exactness import classify_exactness, probe_exactness
from .funcspace import DEFAULT_RESOLUTION, Interval, corpus_ids, get_function
from .harness import RunConfig, fmt
from .moduli import modulus, simpson_factor_report, sperling_constants
from .rules import RuleParams, error_functional, integral_mean, quadrature_value

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2
NEAR_SIMPSON_TOL = 1e-3


class UsageError(Exception):
    pass


def _interval(args) -> Interval:
    try:
        return Interval(args.a, args.b)
    except (ValueError, AlomariError) as exc:
        raise UsageError(str(exc)) from exc


def _params(args) -> RuleParams:
    iv = _interval(args)
    x = iv.midpoint() if args.x is None else args.x
    return RuleParams(args.lam, args.mu, x, iv)


def _emit(text: str, out: str | None) -> None:
    if out:
        harness.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_bound(args) -> int:
    p = _params(args)
    iv = p.iv
    t5 = theorem5_report(p)
    print(f"C(x,lambda,mu) {fmt(2 * iv.length() * t5.constant)}")
    print(f"first-derivative bound {fmt(t5.constant)} (oracle {fmt(t5.oracle_value)}, verdict {t5.verdict.value})")
    for c in harness.applicable_cases(p):
        r = harness.case_report(c, p)
        name = r.source.rsplit("-order", 1)[0]
        print(f"{name} order{c.derivative_order} constant {fmt(r.constant)} "
              f"oracle {fmt(r.oracle_value)} verdict {r.verdict.value}")
    n = classify_exactness(p.lam, p.mu, p.x, iv)
    print(f"exactness {n.degree} ({n.row})")
    near = abs(p.lam - 1 / 3) < NEAR_SIMPSON_TOL and abs(p.x - iv.midpoint()) < NEAR_SIMPSON_TOL * iv.length()
    if near and n.degree != 3 and p.mu == 0.5:
        print(f"warning: near-Simpson parameters; exactness {n.degree} not 3 "
              "(lambda must equal 1/3 exactly)")
    return EXIT_OK


def cmd_eval(args) -> int:
    p = _params(args)
    f = get_function(args.f, p.iv)
    print(json.dumps({
        "function": f.id,
        "mean": integral_mean(f, p.iv),
        "rule": quadrature_value(f, p),
        "E": error_functional(f, p),
    }, indent=1))
    return EXIT_OK


def cmd_exactness(args) -> int:
    iv = _interval(args)
    if args.sweep:
        rows = harness.exactness_sweep(iv)
        _emit(harness.csv_text(harness.SWEEP_COLUMNS, rows), args.out)
        return EXIT_OK if all(r[-1] == "true" for r in rows) else EXIT_VIOLATIONS
    if args.lam is None or args.mu is None:
        raise UsageError("--lambda and --mu are required without --sweep")
    p = _params(args)
    c = classify_exactness(p.lam, p.mu, p.x, iv)
    pr = probe_exactness(p, args.max_degree)
    print(f"classified {c.degree} ({c.row})")
    print(f"probed {pr.degree} (E(e_{pr.witness}) = {fmt(pr.witness_error)})")
    return EXIT_OK if c.degree == pr.degree else EXIT_VIOLATIONS


def cmd_verify(args) -> int:
    try:
        config = RunConfig.load(args.config)
    except FileNotFoundError as exc:
        raise UsageError(f"config not found: {exc}") from exc
    fmt_name = args.format or config.output_format
    out = args.out or config.output_path
    if args.workers:
        config = RunConfig(**{**config.__dict__, "workers": args.workers})
    records = harness.run_sweep(config)
    harness.atomic_write(out, harness.render(records, fmt_name))
    summary = harness.summarize(records)
    print(summary.line())
    return EXIT_OK if summary.violations == 0 else EXIT_VIOLATIONS


def cmd_table1(args) -> int:
    rows = harness.table1(_interval(args))
    _emit(harness.csv_text(harness.TABLE1_COLUMNS, rows), args.out)
    return EXIT_OK if all(r[-1] == "true" for r in rows) else EXIT_VIOLATIONS


def cmd_sharpness(args) -> int:
    r = harness.sharpness(args.x, args.alpha, _interval(args))
    print(f"|E(f*)| {fmt(r.abs_E)}")
    print(f"bound {fmt(r.bound)}")
    print(f"relative gap {fmt(r.rel_gap)}")
    return EXIT_OK if r.rel_gap <= args.gap_tol else EXIT_VIOLATIONS


def cmd_modulus(args) -> int:
    iv = _interval(args)
    f = get_function(args.f, iv)
    value = modulus(f, args.order, args.h, iv, args.resolution, use_exact=not args.grid_only)
    print(fmt(value))
    return EXIT_OK


def cmd_sperling(args) -> int:
    out = {"general": sperling_constants(args.s).to_dict()}
    if args.s == 4:
        out["s4"] = simpson_factor_report()
    print(json.dumps(out, indent=1))
    return EXIT_OK


def _add_interval(sp, a=0.0, b=1.0) -> None:
    sp.add_argument("--a", type=float, default=a)
    sp.add_argument("--b", type=float, default=b)


def _add_rule(sp, required=True) -> None:
    _add_interval(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=required)
    sp.add_argument("--mu", type=float, required=required)
    sp.add_argument("--x", type=float, default=None, help="node; defaults to the midpoint")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alomari", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bound", help="C(x,lambda,mu) and applicable case constants")
    _add_rule(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("eval", help="evaluate E(f) for a corpus function")
    _add_rule(sp)
    sp.add_argument("--f", required=True, help="corpus id")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("exactness", help="degree of exactness, or the full sweep")
    _add_rule(sp, required=False)
    sp.add_argument("--sweep", action="store_true")
    sp.add_argument("--max-degree", type=int, default=8)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_exactness)

    sp = sub.add_parser("verify", help="run a verification sweep and write a report")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("table1", help="degree-of-exactness table as CSV")
    _add_interval(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("sharpness", help="equality check for the Lip-alpha two-node bound")
    _add_interval(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--gap-tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_sharpness)

    sp = sub.add_parser("modulus", help="omega_n(f; h) for a corpus function")
    _add_interval(sp)
    sp.add_argument("--f", required=True, choices=corpus_ids(), metavar="ID")
    sp.add_argument("--order", type=int, choices=(1, 2, 4), required=True)
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    sp.add_argument("--grid-only", action="store_true", help="ignore analytic moduli")
    sp.set_defaults(func=cmd_modulus)

    sp = sub.add_parser("sperling", help="Sperling constant breakdown as JSON")
    sp.add_argument("--s", type=int, default=4)
    sp.set_defaults(func=cmd_sperling)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, AlomariError) as exc:
        print(f"alomari {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"alomari {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS


if __name__ == "__main__":
    sys.exit(main())
