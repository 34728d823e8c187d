import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from almostfano.invariants import PairingKind
from almostfano.report import (
    ParseError,
    emit,
    golden_dir,
    load_golden,
    parse_csv,
    parse_golden,
    parse_json,
    split_fields,
)
from almostfano.tables import TableId, build_pairing, build_table

from conftest import GOLDEN


def test_split_fields_respects_parentheses():
    assert split_fields("1,(0^3,1),(3,4),+") == ["1", "(0^3,1)", "(3,4)", "+"]
    assert split_fields('1,"(0,1)",') == ["1", "(0,1)", ""]


def test_a3_csv_header_and_row():
    lines = emit(build_table(TableId.A3), "csv").decode().splitlines()
    assert lines[0] == "no,k3,r_x,kf2,splitting,k3_target,E_type,ref,status"
    assert lines[4].startswith("4,4,1,3,(0^3,1),9/2,P2:O(-2)")


def test_csv_is_byte_stable_and_lf():
    a = emit(build_table(TableId.A1), "csv")
    b = emit(build_table(TableId.A1), "csv")
    assert a == b and b"\r" not in a and a.endswith(b"\n")


def test_empty_table_json():
    assert emit(build_pairing(PairingKind.CB_CB), "json").decode().strip() == "[]"


def test_json_carries_reasons_and_schema():
    data = json.loads(emit(build_pairing(PairingKind.DP_CURVE), "json"))
    assert all(obj["schema"] == 1 for obj in data)
    statuses = {obj["status"] for obj in data}
    assert "x:GRADARG" in statuses and "+" in statuses


def test_csv_keeps_flags_only():
    text = emit(build_pairing(PairingKind.DP_CURVE), "csv").decode()
    assert "x:" not in text
    assert ",x\n" in text


def test_md_and_tex():
    md = emit(build_table(TableId.A2), "md").decode()
    assert "| no | k3 |" in md and "(5,13)" in md
    tex = emit(build_table(TableId.A2), "tex").decode()
    assert tex.startswith(r"\begin{tabular}") and r"\end{tabular}" in tex
    assert "$(0^4,1^3)$" in tex


def test_unknown_format():
    with pytest.raises(ValueError):
        emit(build_table(TableId.A5), "xlsx")


@pytest.mark.parametrize("tid", list(TableId))
def test_csv_round_trip(tid):
    table = build_table(tid)
    back = parse_csv(emit(table, "csv").decode(), tid)
    assert back.multiset() == table.multiset()


@pytest.mark.parametrize("tid", list(TableId))
def test_json_round_trip(tid):
    table = build_table(tid)
    back = parse_json(emit(table, "json").decode(), table.columns, tid.value, tid)
    assert back.multiset(flags_only=False) == table.multiset(flags_only=False)


@pytest.mark.parametrize("pairing", list(PairingKind))
@pytest.mark.parametrize("raw", [False, True])
def test_pairing_round_trips(pairing, raw):
    table = build_pairing(pairing, raw)
    back = parse_csv(emit(table, "csv").decode())
    assert back.multiset() == table.multiset()
    back = parse_json(emit(table, "json").decode(), table.columns)
    assert back.multiset(flags_only=False) == table.multiset(flags_only=False)


@pytest.mark.parametrize("tid", list(TableId))
def test_golden_files_round_trip(tid):
    golden = load_golden(tid)
    again = parse_csv(emit(golden, "csv").decode(), tid)
    assert again.multiset() == golden.multiset()


def test_golden_a1_has_17_lines():
    assert len(parse_golden(GOLDEN / "A1.csv")) == 17


def test_truncated_file_reports_line(tmp_path):
    text = (GOLDEN / "A1.csv").read_text()
    cut = text[: text.index("\n12,") + 10]
    path = tmp_path / "A1.csv"
    path.write_text(cut)
    with pytest.raises(ParseError) as err:
        parse_golden(path)
    assert err.value.line == 13


def test_schema_mismatch_names_column(tmp_path):
    path = tmp_path / "A3.csv"
    path.write_text((GOLDEN / "A3.csv").read_text().replace("E_type", "surface", 1))
    with pytest.raises(ParseError, match="E_type"):
        parse_golden(path)


def test_bad_status(tmp_path):
    path = tmp_path / "A5.csv"
    path.write_text((GOLDEN / "A5.csv").read_text().replace(",+\n", ",!\n", 1))
    with pytest.raises(ParseError, match="status"):
        parse_golden(path)


def test_json_errors():
    with pytest.raises(ValueError):
        parse_json("{}", ("k3",))
    with pytest.raises(ValueError):
        parse_json('[{"schema": 2, "k3": "4"}]', ("k3",))
    with pytest.raises(ValueError):
        parse_json('[{"schema": 1}]', ("k3",))


def test_golden_dir_override(monkeypatch, tmp_path):
    monkeypatch.setenv("ALMOSTFANO_GOLDEN_DIR", str(tmp_path))
    assert golden_dir() == tmp_path
    assert golden_dir("/elsewhere").as_posix() == "/elsewhere"
    monkeypatch.delenv("ALMOSTFANO_GOLDEN_DIR")
    assert (golden_dir() / "A1.csv").exists()


cells = st.one_of(
    st.integers(-60, 60).map(str),
    st.builds(lambda a, b: f"({a},{b})", st.integers(-9, 9), st.integers(-9, 9)),
    st.sampled_from(["9/2", "-1/2", "P2:O(-2)", "Q:O(-1)", "dpcurve:3", ""]),
)


@settings(max_examples=200, deadline=None)
@given(rows=st.lists(st.tuples(cells, cells, st.sampled_from(["+", "?", "x"])), max_size=8))
def test_csv_round_trip_on_arbitrary_cells(rows):
    body = "\n".join(f"{i},{a},{b},{s}" for i, (a, b, s) in enumerate(rows, 1))
    text = "no,p,q,status\n" + body + ("\n" if rows else "")
    table = parse_csv(text)
    assert parse_csv(emit(table, "csv").decode()).multiset() == table.multiset()
    assert [r.get("q") for r in table.records] == [b for _, b, _ in rows]
