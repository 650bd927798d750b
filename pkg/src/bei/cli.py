"""Command line entry point: ``bei predict|oracle|verify|decompose|suite``.

Exit status is 1 when any report contains a VIOLATION (or a cache audit
mismatch), 2 on input errors, 0 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra.ideals import DEFAULT_GB_CAP
from .cutsets import DEFAULT_ENUM_CAP
from .errors import BeiError
from .harness import (
    DEFAULT_CHAR, DEFAULT_RES_CAP, FAMILIES, SCHEMA, Options, cmd_decompose, cmd_oracle,
    cmd_predict, cmd_suite, cmd_verify, open_cache, render_text, write_csv, write_json,
)


def int_list(text: str) -> list:
    """"2,3" or "2-4" or a mix such as "2,4-6"."""
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if "-" in piece:
            a, b = piece.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif piece:
            out.append(int(piece))
    if not out:
        raise argparse.ArgumentTypeError(f"no integers in {text!r}")
    return out


def _common(p: argparse.ArgumentParser, m_default="2"):
    p.add_argument("--m", type=int_list, default=int_list(m_default),
                   help="number of rows m (list or range allowed, e.g. 2,3 or 2-4)")
    p.add_argument("--char", type=int, default=DEFAULT_CHAR, help="prime characteristic")
    p.add_argument("--order", default="degrevlex", choices=("degrevlex", "lex"),
                   help="monomial order for the Groebner basis")
    p.add_argument("--gb-cap", type=int, default=DEFAULT_GB_CAP,
                   help="max variables for Groebner computations")
    p.add_argument("--res-cap", type=int, default=DEFAULT_RES_CAP,
                   help="max variables for the resolution")
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP,
                   help="max vertices for cut-set enumeration")
    p.add_argument("--formula-only", action="store_true", help="skip the algebraic oracle")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--csv", metavar="PATH", help="write the CSV report here")
    p.add_argument("--cache", metavar="DIR", help="result cache directory (default $BEI_CACHE)")
    p.add_argument("--seed", type=int, default=0, help="seed for cache audits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bei", description="Invariants of generalized binomial edge ideals J_{K_m,G}.")
    parser.add_argument("--version", action="version", version=f"bei {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("predict", "closed-form prediction"),
                           ("oracle", "compute dim, depth and reg algebraically"),
                           ("verify", "prediction vs oracle with verdicts"),
                           ("decompose", "minimal primes and intersection identities")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("expr", help="graph expression, e.g. 'circ(Fp(3)@6, Fp(2)@1)'")
        _common(p)
        if name == "decompose":
            p.add_argument("--no-identity", action="store_true",
                           help="skip the Groebner check of the intersection identities")
    p = sub.add_parser("suite", help="verify a whole family")
    p.add_argument("family", choices=sorted(FAMILIES))
    _common(p, "2,3")
    p.add_argument("--n-max", type=int, default=4, help="fans: largest base clique")
    p.add_argument("--w-max", type=int, default=2, help="fans: largest |W|")
    p.add_argument("--h-max", type=int, default=2, help="fans: largest branch excess h")
    p.add_argument("--pure-only", action="store_true", help="fans: pure fans only")
    p.add_argument("--p-max", type=int, default=3, help="fp: largest p")
    p.add_argument("--t-max", type=int, default=5, help="paths: longest path")
    p.add_argument("--count", type=int, default=20, help="composites: how many")
    p.add_argument("--max-vars", type=int, default=None,
                   help="skip instances with m*|V| above this")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _family_args(args) -> dict:
    f = args.family
    if f == "fans":
        return {"n_max": args.n_max, "w_max": args.w_max, "h_max": args.h_max,
                "pure_only": args.pure_only}
    if f == "fp":
        return {"p_max": args.p_max}
    if f == "paths":
        return {"t_max": args.t_max}
    if f == "kn":
        return {"n_max": args.n_max}
    if f == "composites":
        return {"count": args.count}
    return {}


def run(args) -> dict:
    opts = Options(char=args.char, order=args.order, gb_cap=args.gb_cap, res_cap=args.res_cap,
                   enum_cap=args.enum_cap, formula_only=args.formula_only,
                   cache_dir=args.cache, seed=args.seed)
    if args.command == "suite":
        return cmd_suite(args.family, args.m, opts, jobs=args.jobs, max_vars=args.max_vars,
                         **_family_args(args))
    cache = open_cache(opts)
    reports = []
    for m in args.m:
        if args.command == "predict":
            reports.append(cmd_predict(args.expr, m, opts))
        elif args.command == "oracle":
            reports.append(cmd_oracle(args.expr, m, opts, cache))
        elif args.command == "verify":
            reports.append(cmd_verify(args.expr, m, opts, cache))
        else:
            reports.append(cmd_decompose(args.expr, m, opts, identity=not args.no_identity))
    if cache is not None:
        for r in reports:
            r["cache"] = cache.stats()
        if cache.mismatches:
            reports[-1]["violation"] = True
    if len(reports) == 1:
        return reports[0]
    return {"schema": SCHEMA, "command": args.command, "reports": reports,
            "violation": any(r["violation"] for r in reports)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = run(args)
    except BeiError as e:
        print(f"bei: {e.kind}: {e}", file=sys.stderr)
        return 2
    singles = rep.get("reports", [rep])
    if args.json == "-":
        json.dump(rep, sys.stdout, indent=2, sort_keys=True, default=str)
        sys.stdout.write("\n")
    else:
        for r in singles:
            sys.stdout.write(render_text(r))
        if args.json:
            write_json(rep, args.json)
    if args.csv:
        write_csv({"command": "suite", "instances": singles} if "reports" in rep else rep, args.csv)
    return 1 if rep.get("violation") or any(r.get("violation") for r in singles) else 0


if __name__ == "__main__":
    sys.exit(main())
