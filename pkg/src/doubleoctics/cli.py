"""Command-line entry point: ``doubleoctics <command> ...``.

Exit codes: 0 success, 1 usage, 2 data error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _count_arg(text: str) -> int:
    """Accept integers and exact scientific notation such as 4e11."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value.to_integral_value() or value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return int(value)


def _threshold_arg(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 25:
        raise argparse.ArgumentTypeError("threshold must lie in 1..25")
    return value


def _twists_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad twist list {text!r}") from None


def _matrix_arg(text: str) -> tuple[tuple[int, ...], ...]:
    rows = [r for r in text.replace(";", "/").split("/") if r.strip()]
    try:
        m = tuple(tuple(int(x) for x in r.split(",")) for r in rows)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}") from None
    if len(m) != 4 or any(len(r) != 4 for r in m):
        raise argparse.ArgumentTypeError("matrix must be 4 rows of 4 integers, e.g. 1,1,0,0;1,-1,0,0;0,0,1,1;0,0,1,-1")
    return m


def _coeffs(text: str):
    from .octic import check_nonzero, parse_coeffs

    try:
        v = parse_coeffs(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        check_nonzero(v)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    return v


def build_parser() -> argparse.ArgumentParser:
    from .counting import SCHEMES, default_cache_dir

    ap = _Parser(prog="doubleoctics", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--cache-dir", type=Path, default=None,
                    help=f"table cache (default: $DOUBLEOCTICS_CACHE or {default_cache_dir()})")
    ap.add_argument("--scheme", choices=SCHEMES, default="exact", help="aggregation scheme")
    ap.add_argument("--threads", type=int, default=1, help="worker processes")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tables", help="build and cache the aggregated evaluation tables")
    p.add_argument("--all-schemes", action="store_true", help="build all three schemes")

    p = sub.add_parser("count", help="count points of u^2 = f over F_p")
    p.add_argument("--coeffs", required=True, help="e.g. b=1,r=-2")
    p.add_argument("--prime", type=int)
    p.add_argument("--naive", action="store_true", help="full enumeration instead of tables")
    p.add_argument("--torus", action="store_true", help="only points with xyzt != 0 (implies --naive)")

    p = sub.add_parser("search", help="scan a coefficient range against a newform table")
    p.add_argument("--preset", help="named range, e.g. sweep-phi2, sweep-bruch")
    p.add_argument("--letters")
    p.add_argument("--phi-min", type=int)
    p.add_argument("--phi-max", type=int)
    p.add_argument("--psi-min", type=int)
    p.add_argument("--psi-max", type=int)
    p.add_argument("--forms", type=Path, help="newform table (default: built-in eta forms)")
    p.add_argument("--threshold", type=_threshold_arg, default=21)
    p.add_argument("--twists", type=_twists_arg, help="comma-separated discriminants")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--chunk-size", type=int, default=1 << 16)
    p.add_argument("--no-early-abort", action="store_true")
    p.add_argument("--max-chunks", type=int, help=argparse.SUPPRESS)

    p = sub.add_parser("transform", help="apply a correspondence machine")
    p.add_argument("--op", required=True,
                   choices=("segre", "invert", "signchange", "coordchange", "linear"))
    p.add_argument("--coeffs", required=True)
    p.add_argument("--lam", type=int, help="lambda for coordchange")
    p.add_argument("--matrix", type=_matrix_arg, help="rows separated by ';' for linear")
    p.add_argument("--normalize", choices=("square", "primitive"), default="square")

    p = sub.add_parser("estimate", help="expected number of chance matches")
    p.add_argument("--octics", type=_count_arg, required=True)
    p.add_argument("--forms", type=_count_arg, required=True)

    p = sub.add_parser("etaform", help="write a newform table from eta products")
    p.add_argument("--spec", action="append", required=True, help="e.g. 2:4,4:4 (repeatable)")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    return ap


def _cache_dir(args) -> Path:
    from .counting import default_cache_dir

    return args.cache_dir if args.cache_dir is not None else default_cache_dir()


def cmd_tables(args) -> int:
    from .counting import SCHEMES, ensure_tables, total_points
    from .fieldcore import PRIMES, projective_size

    cache = _cache_dir(args)
    schemes = SCHEMES if args.all_schemes else (args.scheme,)
    total = total_points()
    print(f"total points: {total}")
    for scheme in schemes:
        tables, built = ensure_tables(cache, scheme)
        for p, t in zip(PRIMES, tables):
            print(f"{scheme} p={p} points={projective_size(p)} aggregates={len(t)}")
        entries = sum(len(t) for t in tables)
        print(f"aggregates ({scheme}): {entries} ({100 * entries / total:.2f}% of {total})")
        print(f"{scheme}: {'cache hit' if not built else f'built {built} tables'} in {cache}")
    return EXIT_OK


def cmd_count(args) -> int:
    from .counting import build_table, count_points_fast, count_points_naive, load_table, table_path
    from .fieldcore import PRIMES, prime_ctx

    v = _coeffs(args.coeffs)
    primes = PRIMES
    if args.prime is not None:
        if args.prime not in PRIMES:
            raise UsageError(f"--prime must be one of the first 25 primes, got {args.prime}")
        primes = (args.prime,)
    cache = _cache_dir(args)
    print("# p count (1-count) mod p")
    for p in primes:
        ctx = prime_ctx(p)
        if args.naive or args.torus:
            n = count_points_naive(v, ctx, torus_only=args.torus)
        else:
            path = table_path(cache, p, args.scheme)
            table = load_table(path) if path.exists() else build_table(ctx, args.scheme)
            n = count_points_fast(v, table)
        print(f"{p} {n} {(1 - n) % p}")
    return EXIT_OK


def cmd_search(args) -> int:
    from .counting import TableStack, load_tables
    from .newforms import default_twists, eta_table, load_table
    from .search import CheckpointMismatch, SearchRange, preset, range_size, run_search

    overrides = {k: v for k, v in (
        ("letters", args.letters), ("phi_min", args.phi_min), ("phi_max", args.phi_max),
        ("psi_min", args.psi_min), ("psi_max", args.psi_max),
    ) if v is not None}
    overrides["threshold"] = args.threshold
    overrides["twists"] = args.twists or tuple(default_twists())
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    try:
        rng = preset(args.preset, **overrides) if args.preset else SearchRange(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    forms = load_table(args.forms) if args.forms else eta_table()
    cache = _cache_dir(args)
    try:
        tables = load_tables(cache, args.scheme)
    except FileNotFoundError as exc:
        raise DataError(f"missing table {exc}; run `doubleoctics --cache-dir {cache} "
                        f"--scheme {args.scheme} tables` first") from None
    print(f"# range: {rng.describe()} ({range_size(rng)} candidates)", file=sys.stderr)
    try:
        summary = run_search(
            rng, TableStack(tables), forms, args.out,
            workers=args.threads, chunk_size=args.chunk_size,
            checkpoint_path=args.checkpoint, resume=args.resume,
            early_abort=not args.no_early_abort, max_chunks=args.max_chunks,
        )
    except CheckpointMismatch as exc:
        raise DataError(str(exc)) from None
    status = "complete" if summary.complete else "interrupted (resumable)"
    print(f"candidates={summary.candidates} hits={summary.hits} "
          f"elapsed={summary.elapsed:.2f}s rate={summary.rate:.0f}/s {status}")
    return EXIT_OK


def cmd_transform(args) -> int:
    from . import correspondences as corr
    from .octic import format_coeffs

    v = _coeffs(args.coeffs)
    try:
        if args.op == "segre":
            out = corr.segre(v)
        elif args.op == "invert":
            out = corr.inversion(v)
        elif args.op == "signchange":
            out = corr.sign_change(v)
        elif args.op == "coordchange":
            if args.lam is None:
                raise UsageError("coordchange needs --lam")
            out = corr.coordinate_change(v, args.lam, args.normalize)
        else:
            if args.matrix is None:
                raise UsageError("linear needs --matrix")
            out = corr.linear_substitution(v, args.matrix, args.normalize)
            if out is None:
                raise DataError("image is not S4-symmetric")
    except corr.DomainError as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(format_coeffs(out))
    return EXIT_OK


def cmd_estimate(args) -> int:
    from .stats import chance_possibilities, expected_false_positives, sample_space_size

    chance = chance_possibilities()
    space = sample_space_size()
    expected = expected_false_positives(args.octics, args.forms)
    print(f"chance possibilities (>= 21 of 25): {chance}")
    print(f"sample space (product of first 25 primes): {space}")
    print(f"per octic and form: {chance / space:.6e}")
    print(f"expected false positives: {float(expected):.6e}")
    print(f"exact: {expected.numerator}/{expected.denominator}")
    return EXIT_OK


def cmd_etaform(args) -> int:
    from .newforms import eta_record, format_table, parse_eta_spec

    try:
        records = [eta_record(parse_eta_spec(s)) for s in args.spec]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = format_table(records)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "tables": cmd_tables,
    "count": cmd_count,
    "search": cmd_search,
    "transform": cmd_transform,
    "estimate": cmd_estimate,
    "etaform": cmd_etaform,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"doubleoctics: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"doubleoctics: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"doubleoctics: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"doubleoctics: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
