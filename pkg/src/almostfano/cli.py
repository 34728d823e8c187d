"""Command-line entry point: ``almostfano <subcommand> ...``.

Exit codes: 0 success, 1 verification mismatch or pipeline error, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import LedgerGap, fano_rho1, ledger_by_key, special_cases
from .chow import BundleModel, ThreefoldData, chi_threefold, evaluate_top, parse_class
from .constraints import FILTER_NAMES, FILTERS, checks_for
from .invariants import PairingKind, render_rational
from .report import FORMATS, ParseError, emit, golden_dir, load_golden
from .tables import (
    LedgerConflict,
    Table,
    TableId,
    build_pairing,
    build_table,
    diff_golden,
    in_golden_order,
    run_pipeline,
)

PAIRING_CHOICES = [p.value for p in PairingKind] + ["all"]
TABLE_CHOICES = [t.value for t in TableId]


class UsageError(Exception):
    pass


def _table_id(text: str) -> TableId:
    try:
        return TableId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almostfano",
        description="Enumerate and verify numerical types of flopping weak Fano threefolds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    en = sub.add_parser("enumerate", help="print the candidates of a pairing or a finished table")
    which = en.add_mutually_exclusive_group(required=True)
    which.add_argument("--pairing", choices=PAIRING_CHOICES)
    which.add_argument("--table", type=_table_id, metavar="|".join(TABLE_CHOICES))
    en.add_argument("--raw", action="store_true", help="search output before filters and statuses")
    en.add_argument("--format", choices=FORMATS, default="csv")
    en.add_argument("--out", type=Path, help="write here instead of stdout")
    en.add_argument("--disable-filter", action="append", default=[], choices=FILTER_NAMES,
                    metavar="NAME", help=f"skip a mechanical filter ({', '.join(FILTER_NAMES)})")
    en.add_argument("--order", choices=("canonical", "golden"), default="canonical",
                    help="row order for --table output")
    en.add_argument("--figure", type=Path, metavar="PATH", help="also save a scatter plot by status")

    ve = sub.add_parser("verify", help="rebuild tables and diff them against golden data")
    ve.add_argument("--golden", type=Path, metavar="DIR")
    ve.add_argument("--table", type=_table_id, action="append", metavar="|".join(TABLE_CHOICES))

    ch = sub.add_parser("chow", help="intersection numbers and Riemann-Roch")
    chsub = ch.add_subparsers(dest="chow_command", required=True)
    ev = chsub.add_parser("eval", help="degree of a top-degree class on P(E)")
    ev.add_argument("--base", choices=("p1", "p2"), required=True)
    ev.add_argument("--rank", type=int, required=True)
    ev.add_argument("--chern", required=True, help="c1 or c1,c2")
    ev.add_argument("--class", dest="expr", required=True, help="e.g. '(z+2h)^2*z'")
    ev.add_argument("--power", type=int, default=1)
    rr = chsub.add_parser("rr", help="chi(x(-K) + yL) from intersection data")
    rr.add_argument("--data", type=Path, required=True, help="json with k3, k2l, kl2, l3, c2l")
    rr.add_argument("--x", type=_fraction, required=True)
    rr.add_argument("--y", type=_fraction, required=True)

    ca = sub.add_parser("catalog", help="Fano threefolds of Picard number one and special rows")
    ca.add_argument("--index", type=int, choices=(1, 2, 3, 4))

    ex = sub.add_parser("explain", help="show how one row was decided")
    ex.add_argument("--pairing", choices=[p.value for p in PairingKind], required=True)
    ex.add_argument("--row", required=True, help="ledger key (e.g. 22, II.5) or row identity")
    ex.add_argument("--disable-filter", action="append", default=[], choices=FILTER_NAMES, metavar="NAME")
    return parser


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        out.write_bytes(data)


def cmd_enumerate(args) -> int:
    if args.table is not None:
        table = build_table(args.table, args.disable_filter)
        if args.order == "golden":
            table = in_golden_order(table, load_golden(args.table))
        tables = [table]
    else:
        kinds = list(PairingKind) if args.pairing == "all" else [PairingKind.from_cli(args.pairing)]
        tables = [build_pairing(k, args.raw, args.disable_filter) for k in kinds]
    chunks = [emit(t, args.format) for t in tables]
    if len(tables) > 1 and args.format == "csv":
        chunks = [f"# {t.name}\n".encode() + c for t, c in zip(tables, chunks)]
    _write(b"\n".join(chunks), args.out)
    for t in tables:
        for line in t.trace:
            print(f"trace ({t.name}): {line}", file=sys.stderr)
    if args.figure is not None:
        from .figures import plot_table

        for t in tables:
            path = args.figure
            if len(tables) > 1:
                path = path.with_name(f"{path.stem}-{t.name}{path.suffix}")
            plot_table(t, path)
    return 0


def cmd_verify(args) -> int:
    ids = args.table or list(TableId)
    directory = golden_dir(args.golden)
    failed = False
    for tid in ids:
        try:
            golden = load_golden(tid, directory)
            diff = diff_golden(build_table(tid), golden)
        except (OSError, ParseError, ValueError, LedgerGap, LedgerConflict) as exc:
            print(f"{tid.value}: error: {exc}", file=sys.stderr)
            failed = True
            continue
        print(f"{tid.value}: {diff.summary()}")
        if not diff.ok:
            failed = True
            print(diff.render(), file=sys.stderr)
    return 1 if failed else 0


def cmd_chow(args) -> int:
    if args.chow_command == "eval":
        try:
            chern = tuple(int(c) for c in args.chern.split(","))
            model = BundleModel(1 if args.base == "p1" else 2, args.rank, chern)
            expr = parse_class(model, args.expr)
            if args.power < 0:
                raise ValueError("power must be non-negative")
            print(evaluate_top(model, expr**args.power))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return 0
    try:
        raw = json.loads(args.data.read_text())
        fields = {k: Fraction(str(v)) for k, v in raw.items()}
        data = ThreefoldData(**fields)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad intersection data: {exc}") from None
    print(render_rational(chi_threefold(data, args.x, args.y)))
    return 0


def cmd_catalog(args) -> int:
    print("index,h3,k3,label")
    for e in fano_rho1(args.index):
        print(f"{e.index},{e.h3},{e.k3},{e.label}")
    if args.index is None:
        print()
        print("special rows:")
        for row in special_cases():
            print(f"  {row.pairing.value} {row.key}: {row.identity()}  [{row.status.citation}]")
    return 0


def _describe(row) -> list[str]:
    out = [f"  identity: {row.identity()}"]
    if row.splitting is not None:
        out.append(f"  splitting: {row.splitting.render()}")
    if row.chern is not None:
        out.append(f"  chern: {row.chern.render()}")
    if row.note:
        out.append(f"  model: {row.note}")
    return out


def cmd_explain(args) -> int:
    pairing = PairingKind.from_cli(args.pairing)
    result = run_pipeline(pairing, disabled=args.disable_filter)
    want = args.row
    lines: list[str] = []
    row = next((r for r in result.rows if want in (r.key, r.identity())), None)
    if row is None:
        row = next(
            (r for r in special_cases() if r.pairing is pairing and want in (r.key, r.identity())),
            None,
        )
    if row is not None:
        lines.append(f"{pairing.value} row {row.key or want}")
        lines += _describe(row)
        lines.append("checks:")
        lines += [f"  {c.render()}" for c in checks_for(row)] or ["  (no search checks for this row)"]
        lines.append("filters:")
        for flt in FILTERS:
            if flt.name in args.disable_filter:
                verdict = "disabled"
            else:
                detail = flt.test(row)
                verdict = "pass" if detail is None else f"fires ({flt.reason.value}): {detail}"
            lines.append(f"  {flt.name}: {verdict}")
        lines.append(f"status: {row.status.render()}")
        lines.append(f"ref: {row.ref}")
        lines.append(f"citation: {row.status.citation}")
    else:
        hit = next(((e, s) for e, s in result.rejected if want == e.identity), None)
        if hit is None:
            try:
                entry = ledger_by_key(pairing, want)
            except LedgerGap:
                raise UsageError(f"no row {want!r} in pairing {pairing.value}") from None
            hit = next(((e, s) for e, s in result.rejected if e.identity == entry.identity), None)
            if hit is None:
                raise UsageError(f"no row {want!r} in pairing {pairing.value}")
        exc, status = hit
        lines.append(f"{pairing.value} candidate {want} (rejected before row construction)")
        lines.append(f"  identity: {exc.identity}")
        lines.append(f"  {exc.detail}")
        lines.append(f"status: {status.render()}")
        lines.append(f"citation: {status.citation}")
    for t in result.trace:
        lines.append(f"trace: {t}")
    print("\n".join(lines))
    return 0


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "chow": cmd_chow,
    "catalog": cmd_catalog,
    "explain": cmd_explain,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"almostfano: error: {exc}", file=sys.stderr)
        return 2
    except (LedgerGap, LedgerConflict) as exc:
        print(f"almostfano: pipeline error: {exc}", file=sys.stderr)
        return 1


def run(argv: list[str] | None = None) -> int:
    """Like main, but argparse usage errors come back as exit code 2 instead of SystemExit."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
