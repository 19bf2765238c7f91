"""``sigmaclosure`` command line.

Exit codes: 0 ok, 2 bad exponent or argument, 3 undecided comparison,
4 verification failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import oracle, report, scan
from .closure import DomainError, closure
from .realnum import ComparisonError, Precision, RangeError

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_UNDECIDED = 3
EXIT_VERIFY = 4
EXIT_IO = 5

log = logging.getLogger("sigmaclosure")


def _precision(args) -> Precision:
    return Precision(base=args.prec, max=args.max_prec)


def cmd_closure(args) -> int:
    result = closure(args.r, _precision(args))
    if args.format == "json":
        sys.stdout.write(report.dumps(report.closure_report(result, args.r)))
    else:
        sys.stdout.write(report.render_text(result, args.r))
    return EXIT_OK


def cmd_scan(args) -> int:
    rows = scan.scan(args.r_min, args.r_max, args.step, _precision(args), args.jobs)
    scan.write_csv(rows, args.out)
    failed = sum(1 for row in rows if row.error)
    print(f"{len(rows)} rows written to {args.out} ({failed} with errors)")
    return EXIT_OK


def cmd_plot(args) -> int:
    rows = scan.read_csv(args.scan)
    if not rows:
        raise ValueError(f"{args.scan}: empty scan")
    out = Path(args.out)
    if out.suffix.lower() == ".svg":
        scan.write_svg(rows, out, args.width, args.height)
    elif out.suffix.lower() == ".pgm":
        scan.write_pgm(scan.raster(rows, args.width, args.height), out)
    else:
        raise ValueError("--out must end in .pgm or .svg")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    precision = _precision(args)
    if args.intervals_override:
        r, intervals, _ = report.load_report(Path(args.intervals_override).read_text())
        if args.r is not None and report.parse_real(args.r) != r:
            raise ValueError(f"--r {args.r} does not match r = {r} in the override file")
    else:
        if args.r is None:
            raise ValueError("--r is required without --intervals-override")
        result = closure(args.r, precision)
        r, intervals = result.r, result.intervals
    outcome = oracle.classify(r, args.limit, intervals, precision)
    dens = " ".join(f"{d:.6f}" for d in outcome.densities)
    print(f"r = {r}  N = {outcome.N}  counts = {outcome.counts}  empirical densities = [{dens}]")
    if outcome.unclassified:
        print(f"unclassified: {outcome.unclassified}")
    if outcome.violations:
        shown = ", ".join(map(str, outcome.violations[:10]))
        more = " ..." if len(outcome.violations) > 10 else ""
        print(f"FAIL: {len(outcome.violations)} values in gaps, n = {shown}{more}")
        return EXIT_VERIFY
    print("PASS")
    return EXIT_OK


def cmd_eta(args) -> int:
    bracket = oracle.eta_solve(args.tol, precision=_precision(args))
    lo, hi = bracket.bounds()
    print(f"eta in [{float(lo)!r}, {float(hi)!r}]  width {float(hi - lo):.3g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigmaclosure", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_precision(p):
        p.add_argument("--prec", type=int, default=128, help="base working precision in bits")
        p.add_argument("--max-prec", type=int, default=4096, help="precision ceiling for comparisons")
        return p

    p = with_precision(sub.add_parser("closure", help="intervals and densities for one r"))
    p.add_argument("--r", required=True, help="exponent r > 1, decimal or p/q")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_closure)

    p = with_precision(sub.add_parser("scan", help="closure over a grid of r, as CSV"))
    p.add_argument("--r-min", required=True)
    p.add_argument("--r-max", required=True)
    p.add_argument("--step", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("plot", help="PGM or SVG picture of a scan CSV")
    p.add_argument("--scan", required=True)
    p.add_argument("--width", type=int, default=1000)
    p.add_argument("--height", type=int, default=None, help="defaults to one pixel row per r")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = with_precision(sub.add_parser("verify", help="brute-force check against sigma(n), n <= limit"))
    p.add_argument("--r")
    p.add_argument("--limit", type=int, default=oracle.DEFAULT_LIMIT)
    p.add_argument("--intervals-override", help="JSON report whose intervals are checked instead")
    p.set_defaults(func=cmd_verify)

    p = with_precision(sub.add_parser("eta", help="bracket the density threshold"))
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_eta)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ComparisonError as exc:
        print(f"error: undecided comparison: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, RangeError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
