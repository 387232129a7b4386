"""``slicenum`` command line.

Exit codes: slice-check and kn return 0 when obstructed and 1 when not;
other commands return 0 on success.  Any error returns 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .knots import KnotTableError
from .lattice import LatticeError
from .pipeline import (
    PipelineError,
    RunConfig,
    cmd_dinv,
    cmd_embed,
    cmd_enum_forms,
    cmd_ingest,
    cmd_kn,
    cmd_slice_check,
)

EXIT_OBSTRUCTED = 0
EXIT_NOT_OBSTRUCTED = 1
EXIT_ERROR = 2


def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--cache-dir", default=d(None), help="content-addressed result cache")
    parser.add_argument("--json", action="store_true", default=d(False),
                        help="machine-readable output on stdout")
    parser.add_argument("--threads", type=int, default=d(1))
    parser.add_argument("--experimental-square-quotient", action="store_true", default=d(False),
                        help="also check forms with det K / det Q a square > 1")
    parser.add_argument("--require-conjugation-symmetry", action="store_true", default=d(False),
                        help="only try matchings that commute with conjugation")
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slicenum",
        description="Obstruct slicing knots by crossing changes via d-invariants and lattices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("slice-check", parents=[common],
                        help="can K be sliced with p positive and n = sigma/2 negative changes?")
    sc.add_argument("name", nargs="?", help="knot name (same as --knot)")
    sc.add_argument("--knot")
    sc.add_argument("--two-bridge", metavar="P/Q")
    sc.add_argument("--p", dest="p_pos", type=int, default=0, help="positive crossing changes")
    sc.add_argument("--n", dest="n_neg", type=int, default=None,
                    help="negative crossing changes (default sigma/2)")
    sc.add_argument("--table", help="extra knot table (CSV) to search by name")
    sc.add_argument("--forms-only", action="store_true",
                    help="list candidate forms when the double cover is not a lens space")
    sc.add_argument("--output", "-o", help="write the JSON report here")

    ef = sub.add_parser("enum-forms", parents=[common], help="half-integer surgery forms")
    ef.add_argument("--rank", type=int, required=True, help="rank 2r")
    ef.add_argument("--det", type=int, required=True)
    ef.add_argument("--n-even", type=int, required=True, help="number of even y-squares")

    dv = sub.add_parser("dinv", parents=[common], help="d-invariants of a lens space")
    dv.add_argument("--lens", required=True, metavar="P/Q")
    dv.add_argument("--reversed", action="store_true", help="reverse the orientation")

    em = sub.add_parser("embed", parents=[common], help="embeddings of a linear plumbing in Z^m")
    em.add_argument("--plumbing", help="comma-separated weights, e.g. 2,2,3,2,2")
    em.add_argument("--m", type=int)
    em.add_argument("--dual-kn", type=int, metavar="N",
                    help="all classes for the dual plumbing of K_N")

    kn = sub.add_parser("kn", parents=[common], help="the K_n family")
    kn.add_argument("--n", type=int, required=True)
    kn.add_argument("--check-donaldson", action="store_true")
    kn.add_argument("--r", type=int, help="crossing budget p + n (default n)")
    kn.add_argument("--k", type=int, default=6, help="largest Z^k summand to certify")

    ig = sub.add_parser("ingest", parents=[common], help="validate a knot table (CSV)")
    ig.add_argument("path")
    return parser


def _emit(args, doc, human):
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(human)


def _run(args):
    if args.command == "slice-check":
        if args.name and args.knot:
            raise PipelineError("knot given twice")
        cfg = RunConfig(
            knot=args.name or args.knot, two_bridge=args.two_bridge,
            p_pos=args.p_pos, n_neg=args.n_neg,
            require_conjugation_symmetry=args.require_conjugation_symmetry,
            experimental_square_quotient=args.experimental_square_quotient,
            forms_only=args.forms_only, table=args.table, cache_dir=args.cache_dir,
            output=args.output, threads=args.threads)
        report = cmd_slice_check(cfg)
        for w in cfg.warnings:
            print(f"warning: {w}", file=sys.stderr)
        lines = [f"{report.knot}: p = {report.p}, n = {report.n}",
                 f"determinants tried: {report.determinants_tried}"]
        for f in report.forms:
            gram = [[int(x) for x in row] for row in f["gram"]]
            lines.append(f"  {gram}  det {f['determinant']}: {f['verdict']}"
                         + (f"  ({f['note']})" if "note" in f else ""))
        lines.append(f"conclusion: {report.conclusion} ({report.wall_time_ms} ms)")
        _emit(args, report.to_json(), "\n".join(lines))
        if report.conclusion == "unchecked":
            return EXIT_NOT_OBSTRUCTED
        return EXIT_OBSTRUCTED if report.obstructed else EXIT_NOT_OBSTRUCTED

    if args.command == "enum-forms":
        forms = cmd_enum_forms(args.rank, args.det, args.n_even, args.cache_dir)
        if args.json:
            for g in forms:
                print(json.dumps(g.to_json()))
        else:
            print(f"{len(forms)} form(s)")
            for g in forms:
                print("  " + str([list(r) for r in g.entries]))
        return 0

    if args.command == "dinv":
        table = cmd_dinv(args.lens, args.reversed, args.cache_dir)
        human = "\n".join(f"{i:>4}  {v}" for i, v in enumerate(table.values))
        _emit(args, table.to_json(), human)
        return 0

    if args.command == "embed":
        weights = None
        if args.plumbing:
            try:
                weights = [int(x) for x in args.plumbing.split(",")]
            except ValueError:
                raise PipelineError("--plumbing takes comma-separated integers") from None
        doc = cmd_embed(weights, args.m, args.dual_kn)
        lines = [f"{len(doc['classes'])} embedding class(es)"]
        for c in doc["classes"]:
            lines.append(f"  vectors {c['vectors']}")
            comp = c["complement"] and [[int(x) for x in row] for row in c["complement"]]
            lines.append(f"  complement {comp}")
        _emit(args, doc, "\n".join(lines))
        return 0

    if args.command == "kn":
        doc = cmd_kn(args.n, args.check_donaldson, args.r, args.k)
        lines = [f"{doc['knot']} = S({doc['two_bridge']['p']},{doc['two_bridge']['q']}), "
                 f"det {doc['determinant']}, signature {doc['signature']}"]
        if "donaldson" in doc:
            d = doc["donaldson"]
            lines.append(f"embedding classes of the dual plumbing: {len(d['embedding_classes'])}")
            lines.append(f"conclusion: {d['conclusion']} ({d['reason']})")
        _emit(args, doc, "\n".join(lines))
        if "donaldson" not in doc:
            return 0
        return EXIT_OBSTRUCTED if doc["conclusion"] == "obstructed" else EXIT_NOT_OBSTRUCTED

    if args.command == "ingest":
        recs = cmd_ingest(args.path)
        _emit(args, recs, f"{len(recs)} record(s) OK")
        return 0
    raise PipelineError(f"unknown command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (PipelineError, KnotTableError, LatticeError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
