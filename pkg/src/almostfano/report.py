"""Serialisation of tables: csv, json, markdown and LaTeX out, csv and json in."""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .tables import SCHEMAS, RowRecord, Table, TableId

FORMATS = ("csv", "json", "md", "tex")
SCHEMA_VERSION = 1
GOLDEN_ENV = "ALMOSTFANO_GOLDEN_DIR"


class ParseError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


def _rows(table: Table):
    for no, rec in enumerate(table.records, 1):
        yield no, rec


def _cell(rec: RowRecord, column: str, no: int, full_status: bool) -> str:
    if column == "no":
        return str(no)
    if column == "status":
        return rec.status if full_status else rec.flag
    return rec.get(column)


def emit(table: Table, fmt: str) -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    return {"csv": _csv, "json": _json, "md": _md, "tex": _tex}[fmt](table).encode("utf-8")


def _csv(table: Table) -> str:
    # Parenthesised fields such as (0^3,1) stay unquoted; the reader is
    # parenthesis-aware instead.
    lines = [",".join(table.columns)]
    for no, rec in _rows(table):
        lines.append(",".join(_cell(rec, c, no, False) for c in table.columns))
    return "\n".join(lines) + "\n"


def _json(table: Table) -> str:
    out = []
    for no, rec in _rows(table):
        obj = {"schema": SCHEMA_VERSION, "table": table.name}
        obj.update({c: _cell(rec, c, no, True) for c in table.columns})
        if "status" in table.columns:
            obj["citation"] = rec.citation
        out.append(obj)
    if not out:
        return "[]\n"
    return json.dumps(out, indent=1) + "\n"


def _md(table: Table) -> str:
    head = "| " + " | ".join(table.columns) + " |"
    rule = "|" + "|".join("---" for _ in table.columns) + "|"
    body = [
        "| " + " | ".join(_cell(rec, c, no, True) for c in table.columns) + " |"
        for no, rec in _rows(table)
    ]
    return "\n".join([f"**{table.name}**", "", head, rule, *body]) + "\n"


_TEX_HEAD = {
    "k3": "$(-K_X)^3$",
    "r_x": "$r_X$",
    "kf2": "$K_F^2$",
    "kf2_plus": "$K_{F^+}^2$",
    "alpha": r"$\alpha$",
    "beta": r"$\beta$",
    "alpha_plus": r"$\alpha^+$",
    "lambda": r"$\lambda$",
    "tau": r"$\tau$",
    "chern": "$(c_1,c_2)$",
    "k3_target": "$(-K_Y)^3$",
    "E_type": "$E$",
    "target_l3": "$(rL)^3$",
    "r_target": "$r$",
    "r": "$r$",
    "h3": "$(L^+)^3$",
    "d": "$d$",
    "g": "$g$",
}


def _tex_escape(text: str) -> str:
    return text.replace("_", r"\_").replace("^", r"\^{}")


def _tex(table: Table) -> str:
    cols = table.columns
    lines = [
        r"\begin{tabular}{" + "|".join("c" for _ in cols) + "}",
        " & ".join(_TEX_HEAD.get(c, _tex_escape(c)) for c in cols) + r" \\ \hline",
    ]
    for no, rec in _rows(table):
        cells = []
        for c in cols:
            text = _cell(rec, c, no, True)
            cells.append(f"${text}$" if c in ("splitting", "chern") and text else _tex_escape(text))
        lines.append(" & ".join(cells) + r" \\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reading


def split_fields(line: str) -> list[str]:
    """Split on commas that are not inside parentheses; strip optional quotes."""
    out, cur, depth = [], [], 0
    for ch in line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [f.strip().strip('"') for f in out]


def _status_ok(text: str) -> bool:
    return text in ("", "+", "?", "x") or text.startswith("x:")


def parse_csv(text: str, table_id: TableId | None = None, source: str = "<csv>") -> Table:
    """Inverse of emit(table, 'csv') up to row order.

    Comment lines (#) and blank lines are skipped. With ``table_id`` the
    header must equal that table's schema.
    """
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParseError(source, 1, "no header line")
    head_no, head = lines[0]
    columns = tuple(split_fields(head))
    if table_id is not None:
        want = SCHEMAS[table_id]
        for pos, col in enumerate(want):
            if pos >= len(columns) or columns[pos] != col:
                got = columns[pos] if pos < len(columns) else "<missing>"
                raise ParseError(source, head_no, f"schema mismatch in column {col!r} (found {got!r})")
        if len(columns) > len(want):
            raise ParseError(source, head_no, f"schema mismatch: unexpected column {columns[len(want)]!r}")
    records = []
    for n, ln in lines[1:]:
        fields = split_fields(ln)
        if len(fields) != len(columns):
            raise ParseError(source, n, f"expected {len(columns)} fields, got {len(fields)}")
        row = dict(zip(columns, fields))
        status = row.get("status", "")
        if not _status_ok(status):
            raise ParseError(source, n, f"bad status {status!r}")
        values = tuple((c, row[c]) for c in columns if c not in ("no", "status"))
        records.append(RowRecord(values, status))
    name = table_id.value if table_id else Path(source).stem
    return Table(name, columns, records, table_id)


def parse_golden(path, table_id: TableId | None = None) -> Table:
    path = Path(path)
    if table_id is None:
        table_id = TableId.parse(path.stem)
    return parse_csv(path.read_text(encoding="utf-8"), table_id, str(path))


def parse_json(text: str, columns: tuple[str, ...], name: str = "", table_id: TableId | None = None) -> Table:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("expected a json array of records")
    records = []
    for i, obj in enumerate(data):
        if obj.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"record {i}: unsupported schema {obj.get('schema')!r}")
        missing = [c for c in columns if c not in obj]
        if missing:
            raise ValueError(f"record {i}: missing column {missing[0]!r}")
        values = tuple((c, obj[c]) for c in columns if c not in ("no", "status"))
        records.append(RowRecord(values, obj.get("status", ""), obj.get("citation", "")))
    return Table(name, columns, records, table_id)


def golden_dir(override: str | os.PathLike | None = None) -> Path:
    """Directory holding the golden csv files.

    An explicit argument wins, then the environment variable, then the copy
    shipped with the package.
    """
    if override:
        return Path(override)
    env = os.environ.get(GOLDEN_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("almostfano").joinpath("data", "golden")))


def load_golden(table_id: TableId, directory=None) -> Table:
    return parse_golden(golden_dir(directory) / f"{table_id.value}.csv", table_id)
