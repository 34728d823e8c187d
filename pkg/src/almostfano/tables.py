"""From raw search output to finished tables.

A pipeline runs one pairing: search, mechanical filters, then ledger
statuses for whatever survives. Tables then merge the rows no search
produces, keep the existing and open rows, and render each row to a flat
record keyed by the table's column names.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from .catalog import LedgerGap, ledger_entry, special_cases
from .constraints import FILTERS, Exclusion, SearchBounds, apply_filters, search
from .invariants import (
    ConicBundle,
    DelPezzoFibration,
    NumericalRow,
    PairingKind,
    Status,
    StatusRecord,
    render_rational,
)

__all__ = [
    "LedgerConflict",
    "LedgerGap",
    "PipelineResult",
    "RowRecord",
    "Table",
    "TableId",
    "GoldenDiff",
    "build_table",
    "build_pairing",
    "canonical",
    "columns_for",
    "diff_golden",
    "golden_permutation",
    "run_pipeline",
    "swap_sides",
]


class LedgerConflict(RuntimeError):
    """The ledger and a mechanical filter disagree about a row."""


class TableId(enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"
    A7 = "A7"
    PROP317 = "prop317"
    PROP414 = "prop414"

    @classmethod
    def parse(cls, text: str) -> "TableId":
        for tid in cls:
            if tid.value.lower() == text.lower():
                return tid
        raise ValueError(f"unknown table {text!r}")

    @property
    def pairing(self) -> PairingKind:
        return _TABLE_PAIRING[self]

    @property
    def raw(self) -> bool:
        """Raw tables list search candidates before filters and statuses."""
        return self in (TableId.PROP317, TableId.PROP414)


_TABLE_PAIRING = {
    TableId.A1: PairingKind.DP_DP,
    TableId.A2: PairingKind.DP_CONIC,
    TableId.A3: PairingKind.DP_POINT,
    TableId.A4: PairingKind.DP_CURVE,
    TableId.A5: PairingKind.CB_CB,
    TableId.A6: PairingKind.CB_POINT,
    TableId.A7: PairingKind.CB_CURVE,
    TableId.PROP317: PairingKind.DP_CURVE,
    TableId.PROP414: PairingKind.CB_CURVE,
}

SCHEMAS: dict[TableId, tuple[str, ...]] = {
    TableId.A1: ("no", "k3", "r_x", "kf2", "kf2_plus", "splitting", "alpha", "beta", "lambda", "ref", "status"),
    TableId.A2: ("no", "k3", "r_x", "kf2", "splitting", "tau", "chern", "ref", "status"),
    TableId.A3: ("no", "k3", "r_x", "kf2", "splitting", "k3_target", "E_type", "ref", "status"),
    TableId.A4: ("no", "k3", "kf2", "r_target", "k3_target", "g", "d", "alpha", "beta", "ref", "status"),
    TableId.A5: ("no", "k3", "r_x", "tau", "chern", "ref", "status"),
    TableId.A6: ("no", "k3", "r_x", "tau", "chern", "target_l3", "E_type", "alpha", "beta", "ref", "status"),
    TableId.A7: ("no", "k3", "tau", "k3_target", "r_target", "d", "g", "alpha", "ref", "status"),
    TableId.PROP317: ("no", "r", "k3", "kf2", "g", "d", "alpha", "beta", "h3"),
    TableId.PROP414: ("no", "k3", "alpha_plus", "r", "h3", "d", "g", "tau"),
}

PAIRING_TABLE = {
    PairingKind.DP_DP: TableId.A1,
    PairingKind.DP_CONIC: TableId.A2,
    PairingKind.DP_POINT: TableId.A3,
    PairingKind.DP_CURVE: TableId.A4,
    PairingKind.CB_CB: TableId.A5,
    PairingKind.CB_POINT: TableId.A6,
    PairingKind.CB_CURVE: TableId.A7,
}

RAW_TABLE = {PairingKind.DP_CURVE: TableId.PROP317, PairingKind.CB_CURVE: TableId.PROP414}


def columns_for(pairing: PairingKind, raw: bool = False) -> tuple[str, ...]:
    """Columns used when emitting one pairing's candidates."""
    if raw and pairing in RAW_TABLE:
        return SCHEMAS[RAW_TABLE[pairing]]
    cols = SCHEMAS[PAIRING_TABLE[pairing]]
    return tuple(c for c in cols if c not in ("ref", "status")) if raw else cols


# ---------------------------------------------------------------------------
# records


def _opt(value) -> str:
    return "" if value is None else render_rational(value)


def _tau(row: NumericalRow):
    side = row.side_x if isinstance(row.side_x, ConicBundle) else row.side_plus
    return side.tau


_GETTERS = {
    "k3": lambda row: str(row.k3),
    "r_x": lambda row: str(row.r_x),
    "kf2": lambda row: str(row.side_x.kf2),
    "kf2_plus": lambda row: str(row.side_plus.kf2),
    "splitting": lambda row: row.splitting.render() if row.splitting else "",
    "alpha": lambda row: _opt(row.coeffs and row.coeffs.alpha),
    "beta": lambda row: _opt(row.coeffs and row.coeffs.beta),
    "alpha_plus": lambda row: _opt(row.coeffs and row.coeffs.alpha_plus),
    "lambda": lambda row: _opt(row.side_x.lam),
    "tau": lambda row: str(_tau(row)),
    "chern": lambda row: row.chern.render() if row.chern else "",
    "k3_target": lambda row: render_rational(row.side_plus.target_degree),
    "E_type": lambda row: row.side_plus.surface.value,
    "target_l3": lambda row: _opt(row.side_plus.target_l3),
    "r_target": lambda row: str(row.side_plus.r_target),
    "r": lambda row: str(row.side_plus.r_target),
    "h3": lambda row: str(row.side_plus.h3),
    "d": lambda row: str(row.side_plus.d),
    "g": lambda row: str(row.side_plus.g),
    "ref": lambda row: row.ref or "",
}


@dataclass(frozen=True)
class RowRecord:
    """Flat rendering of a row: column name to text, rationals as p/q.

    ``status`` is "+", "?", "x:<REASON>", a bare "x" when the reason was
    lost (csv keeps flags only), or empty for raw tables.
    """

    values: tuple[tuple[str, str], ...]
    status: str = ""
    citation: str = field(default="", compare=False)
    source: NumericalRow | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_row(cls, row: NumericalRow, columns: Iterable[str]) -> "RowRecord":
        cols = [c for c in columns if c not in ("no", "status")]
        values = tuple((c, _GETTERS[c](row)) for c in cols)
        status = row.status.render() if row.status else ""
        citation = row.status.citation if row.status else ""
        return cls(values, status, citation, row)

    def get(self, column: str) -> str:
        if column == "status":
            return self.status
        return dict(self.values)[column]

    @property
    def flag(self) -> str:
        return self.status[:1]

    def match_key(self) -> tuple:
        return self.values, self.flag


def _sort_part(text: str):
    try:
        return (0, -Fraction(text))
    except (ValueError, ZeroDivisionError):
        return (1, text)


def sort_key(record: RowRecord) -> tuple:
    """Descending on each column in schema order, numbers before text."""
    return tuple(_sort_part(v) for _, v in record.values) + (record.status,)


@dataclass
class Table:
    name: str
    columns: tuple[str, ...]
    records: list[RowRecord]
    table_id: TableId | None = None
    trace: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def sorted(self) -> "Table":
        return replace(self, records=sorted(self.records, key=sort_key))

    def multiset(self, flags_only: bool = True) -> Counter:
        if flags_only:
            return Counter(r.match_key() for r in self.records)
        return Counter((r.values, r.status, r.citation) for r in self.records)


# ---------------------------------------------------------------------------
# pipeline

FILTER_FOR_REASON = {f.reason: f.name for f in FILTERS if f.reason.mechanical}


@dataclass
class PipelineResult:
    pairing: PairingKind
    rows: list[NumericalRow]
    rejected: list[tuple[Exclusion, StatusRecord]]
    trace: list[str]
    disabled: frozenset[str]

    def listed(self) -> list[NumericalRow]:
        return [r for r in self.rows if r.status.code is not Status.EXCLUDED]


def _with_entry(row: NumericalRow, entry, status: StatusRecord) -> NumericalRow:
    out = row.with_status(status, entry.key, entry.ref)
    if out.chern is None and entry.chern is not None:
        out = replace(out, chern=entry.chern)
    return out


def run_pipeline(
    pairing: PairingKind,
    bounds: SearchBounds = SearchBounds(),
    disabled: Iterable[str] = (),
    rng=None,
) -> PipelineResult:
    """Search, filter and attach ledger statuses.

    Raises LedgerGap for a candidate the ledger does not list, and
    LedgerConflict when a filter and the ledger disagree.
    """
    disabled = frozenset(disabled)
    res = search(pairing, bounds, rng)
    kept, dropped = apply_filters(res.rows, disabled)
    rows = []
    for row in kept:
        entry = ledger_entry(pairing, row.identity())
        status = entry.status
        reason = status.reason
        if reason is not None and reason.mechanical:
            name = FILTER_FOR_REASON.get(reason)
            if name is None or name not in disabled:
                raise LedgerConflict(
                    f"{pairing.value} {entry.key}: ledger says {status.render()} "
                    "but no filter removed the row"
                )
            status = StatusRecord(Status.OPEN, None, f"{name} disabled; ledger: {status.citation}")
        rows.append(_with_entry(row, entry, status))
    for row, exc in dropped:
        entry = ledger_entry(pairing, row.identity())
        _agree(pairing, entry, exc)
        status = StatusRecord(Status.EXCLUDED, exc.reason, f"{exc.detail}; {entry.status.citation}")
        rows.append(_with_entry(row, entry, status))
    rejected = []
    for exc in res.rejected:
        entry = ledger_entry(pairing, exc.identity)
        _agree(pairing, entry, exc)
        rejected.append((exc, entry.status))
    rows.sort(key=lambda r: r.identity())
    return PipelineResult(pairing, rows, rejected, list(res.trace), disabled)


def _agree(pairing: PairingKind, entry, exc: Exclusion) -> None:
    if entry.status.reason is not exc.reason:
        raise LedgerConflict(
            f"{pairing.value} {entry.key}: excluded by {exc.reason.value} "
            f"but the ledger says {entry.status.render()}"
        )


def swap_sides(row: NumericalRow) -> NumericalRow:
    """Read a row from the other side of the flop.

    Only meaningful when both sides are fibrations of the same kind. The
    lambda value belongs to the row, so it stays on the X slot.
    """
    if row.pairing not in (PairingKind.DP_DP, PairingKind.CB_CB):
        raise ValueError("only symmetric pairings can be swapped")
    x, plus = row.side_x, row.side_plus
    if isinstance(x, DelPezzoFibration):
        x, plus = DelPezzoFibration(plus.kf2, x.lam), DelPezzoFibration(x.kf2)
    else:
        x, plus = plus, x
    coeffs = row.coeffs.swap() if row.coeffs else None
    return replace(row, side_x=x, side_plus=plus, coeffs=coeffs)


def canonical(row: NumericalRow) -> NumericalRow:
    """Put the larger fibre degree on the X side."""
    if row.pairing is PairingKind.DP_DP and row.side_plus.kf2 > row.side_x.kf2:
        return swap_sides(row)
    return row


def _merge(specials: Iterable[NumericalRow], rows: Iterable[NumericalRow]) -> list[NumericalRow]:
    seen: dict[str, NumericalRow] = {}
    for row in list(specials) + list(rows):
        seen.setdefault(canonical(row).identity(), canonical(row))
    return list(seen.values())


def table_rows(
    table_id: TableId,
    disabled: Iterable[str] = (),
    bounds: SearchBounds = SearchBounds(),
    rng=None,
) -> tuple[list[NumericalRow], list[str]]:
    pairing = table_id.pairing
    if table_id.raw:
        res = search(pairing, bounds, rng)
        return res.rows, res.trace
    result = run_pipeline(pairing, bounds, disabled, rng)
    specials = [r for r in special_cases() if r.pairing is pairing]
    return _merge(specials, result.listed()), result.trace


def build_table(
    table_id: TableId,
    disabled: Iterable[str] = (),
    bounds: SearchBounds = SearchBounds(),
    rng=None,
) -> Table:
    rows, trace = table_rows(table_id, disabled, bounds, rng)
    cols = SCHEMAS[table_id]
    records = [RowRecord.from_row(r, cols) for r in rows]
    return Table(table_id.value, cols, records, table_id, trace).sorted()


def build_pairing(
    pairing: PairingKind,
    raw: bool = False,
    disabled: Iterable[str] = (),
    bounds: SearchBounds = SearchBounds(),
    rng=None,
) -> Table:
    """Every candidate of one pairing; raw skips filters and the ledger."""
    cols = columns_for(pairing, raw)
    if raw:
        res = search(pairing, bounds, rng)
        rows, trace = res.rows, res.trace
    else:
        result = run_pipeline(pairing, bounds, disabled, rng)
        rows, trace = result.rows, result.trace
    name = pairing.value + ("-raw" if raw else "")
    tid = RAW_TABLE.get(pairing) if raw else None
    records = [RowRecord.from_row(r, cols) for r in rows]
    return Table(name, cols, records, tid, list(trace)).sorted()


# ---------------------------------------------------------------------------
# golden comparison


@dataclass
class GoldenDiff:
    name: str
    total: int
    matched: int
    missing: list[RowRecord] = field(default_factory=list)
    extra: list[RowRecord] = field(default_factory=list)
    mismatches: list[tuple[RowRecord, RowRecord, list[str]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.mismatches)

    @property
    def status_mismatches(self) -> list[tuple[RowRecord, RowRecord, list[str]]]:
        return [m for m in self.mismatches if m[2] == ["status"]]

    def summary(self) -> str:
        return f"{self.matched}/{self.total} rows matched"

    def render(self) -> str:
        lines = [f"{self.name}: {self.summary()}"]
        for gold, built, fields in self.mismatches:
            kind = "status mismatch" if fields == ["status"] else "field mismatch"
            detail = ", ".join(f"{f}: golden {gold.get(f)!r} vs built {built.get(f)!r}" for f in fields)
            lines.append(f"  {kind}: {detail}")
        for rec in self.missing:
            lines.append(f"  missing: {_short(rec)}")
        for rec in self.extra:
            lines.append(f"  extra: {_short(rec)}")
        return "\n".join(lines)


def _short(rec: RowRecord) -> str:
    body = ",".join(f"{k}={v}" for k, v in rec.values)
    return f"{body},status={rec.status}" if rec.status else body


def _differing(a: RowRecord, b: RowRecord) -> list[str]:
    out = [k for (k, v), (_, w) in zip(a.values, b.values) if v != w]
    if a.flag != b.flag:
        out.append("status")
    return out


def diff_golden(table: Table, golden: Table) -> GoldenDiff:
    """Multiset comparison, then pair leftovers that differ in few fields."""
    if [c for c in table.columns if c != "no"] != [c for c in golden.columns if c != "no"]:
        raise ValueError(f"column sets differ: {table.columns} vs {golden.columns}")
    built = list(table.records)
    todo = []
    matched = 0
    for rec in golden.records:
        hit = next((i for i, b in enumerate(built) if b.match_key() == rec.match_key()), None)
        if hit is None:
            todo.append(rec)
        else:
            built.pop(hit)
            matched += 1
    diff = GoldenDiff(golden.name, len(golden.records), matched)
    width = len(golden.columns)
    for rec in todo:
        best = min(built, key=lambda b: len(_differing(rec, b)), default=None)
        if best is not None and len(_differing(rec, best)) <= max(1, width // 3):
            diff.mismatches.append((rec, best, _differing(rec, best)))
            built.remove(best)
        else:
            diff.missing.append(rec)
    diff.extra = built
    return diff


def golden_permutation(table: Table, golden: Table) -> list[int]:
    """For each golden row in file order, the index of its match in ``table``."""
    free = list(range(len(table.records)))
    out = []
    for rec in golden.records:
        for pos, i in enumerate(free):
            if table.records[i].match_key() == rec.match_key():
                out.append(free.pop(pos))
                break
        else:
            raise ValueError(f"golden row {_short(rec)} has no match")
    return out


def in_golden_order(table: Table, golden: Table) -> Table:
    perm = golden_permutation(table, golden)
    rest = [r for i, r in enumerate(table.records) if i not in set(perm)]
    return replace(table, records=[table.records[i] for i in perm] + rest)
