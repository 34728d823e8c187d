import random
from dataclasses import replace

import pytest

from almostfano.catalog import LedgerEntry
from almostfano.invariants import PairingKind, Status, StatusRecord
from almostfano.report import load_golden
from almostfano import tables as tables_mod
from almostfano.tables import (
    LedgerConflict,
    LedgerGap,
    RowRecord,
    TableId,
    build_pairing,
    build_table,
    canonical,
    diff_golden,
    golden_permutation,
    in_golden_order,
    run_pipeline,
    swap_sides,
)

SIZES = {"A1": 17, "A2": 5, "A3": 4, "A4": 17, "A5": 2, "A6": 3, "A7": 13, "prop317": 29, "prop414": 17}


@pytest.mark.parametrize("tid", list(TableId))
def test_tables_reproduce_golden(tid):
    table = build_table(tid)
    assert len(table) == SIZES[tid.value]
    diff = diff_golden(table, load_golden(tid))
    assert diff.ok, diff.render()
    assert diff.summary() == f"{SIZES[tid.value]}/{SIZES[tid.value]} rows matched"


def test_a1_order_and_first_row():
    table = build_table(TableId.A1)
    first = table.records[0]
    assert (first.get("k3"), first.get("r_x")) == ("54", "3")
    keys = [(int(r.get("k3")), int(r.get("r_x")), int(r.get("kf2"))) for r in table.records]
    assert keys == sorted(keys, reverse=True)


def test_a4_degree_column():
    ks = [int(r.get("k3")) for r in build_table(TableId.A4).records]
    assert ks == [22, 18, 18, 16, 16, 14, 14, 12, 10, 10, 8, 8, 6, 6, 4, 4, 4]


def test_a5_rows():
    assert [r.get("chern") for r in build_table(TableId.A5).records] == ["(3,6)", "(3,7)"]
    assert len(build_pairing(PairingKind.CB_CB)) == 0


@pytest.mark.parametrize("tid", list(TableId))
def test_build_is_idempotent_and_order_free(tid):
    a = build_table(tid)
    b = build_table(tid, rng=random.Random(7))
    assert [r.match_key() for r in a.records] == [r.match_key() for r in b.records]


@pytest.mark.parametrize(
    "tid,name,added",
    [
        (TableId.A1, "div8", {("2", "8"), ("4", "8")}),
        (TableId.A2, "div8", {("18", "8")}),
        (TableId.A2, "rank2_chern", {("6", "2")}),
    ],
)
def test_disabling_a_filter_adds_documented_rows(tid, name, added):
    diff = diff_golden(build_table(tid, disabled=[name]), load_golden(tid))
    assert not diff.missing and not diff.mismatches
    assert {(r.get("k3"), r.get("kf2")) for r in diff.extra} == added
    assert all(r.flag == "?" for r in diff.extra)


@pytest.mark.parametrize("name,nos", [("gradarg", {10, 13, 15, 19, 26}), ("f_divisible", {5, 6, 23})])
def test_disabling_dp_curve_filters(name, nos):
    diff = diff_golden(build_table(TableId.A4, disabled=[name]), load_golden(TableId.A4))
    assert not diff.missing and not diff.mismatches
    assert {int(r.get("ref").split(":")[1]) for r in diff.extra} == nos


def test_filtered_rows_carry_their_reason():
    result = run_pipeline(PairingKind.DP_CURVE)
    reasons = {r.key: r.status.render() for r in result.rows if r.status.code is Status.EXCLUDED}
    assert reasons["10"] == "x:GRADARG" and reasons["23"] == "x:F_DIVISIBLE"
    assert reasons["24"] == "x:GRUSON_PESKINE"
    assert len(result.listed()) == 17


def test_rejections_are_attributed():
    result = run_pipeline(PairingKind.DP_CONIC)
    assert sorted(s.render() for _, s in result.rejected) == ["x:KF_FORBIDDEN"] * 2


def test_ledger_gap_is_a_hard_error(monkeypatch):
    def missing(pairing, identity):
        raise LedgerGap(f"no ledger entry for {identity}")

    monkeypatch.setattr(tables_mod, "ledger_entry", missing)
    with pytest.raises(LedgerGap, match="k3="):
        build_table(TableId.A3)


def test_ledger_filter_disagreement_is_a_conflict(monkeypatch):
    real = tables_mod.ledger_entry

    def lying(pairing, identity):
        entry = real(pairing, identity)
        if entry.status.code is Status.EXCLUDED:
            return replace(entry, status=StatusRecord(Status.OPEN, None, "wrong"))
        return entry

    monkeypatch.setattr(tables_mod, "ledger_entry", lying)
    with pytest.raises(LedgerConflict):
        build_table(TableId.A1)


def test_survivor_with_mechanical_ledger_reason_is_a_conflict(monkeypatch):
    real = tables_mod.ledger_entry

    def lying(pairing, identity):
        entry = real(pairing, identity)
        if entry.key == "I.5":
            return LedgerEntry(entry.pairing, entry.key, entry.identity,
                               StatusRecord.parse("x:DIV8", "made up"), entry.ref)
        return entry

    monkeypatch.setattr(tables_mod, "ledger_entry", lying)
    with pytest.raises(LedgerConflict):
        build_table(TableId.A1)


def test_flop_symmetry_of_a1():
    rows = [r.source for r in build_table(TableId.A1).records]
    idents = {r.identity() for r in rows}
    for row in rows:
        assert canonical(swap_sides(row)).identity() in idents
        assert swap_sides(swap_sides(row)) == row


def test_asymmetric_row_is_canonicalised():
    half = next(r.source for r in build_table(TableId.A1).records if r.get("beta") == "-1/2")
    flipped = swap_sides(half)
    assert flipped.side_x.kf2 == 4
    assert canonical(flipped) == half
    with pytest.raises(ValueError):
        swap_sides(next(iter(run_pipeline(PairingKind.DP_POINT).rows)))


def test_diff_reports_each_kind():
    table = build_table(TableId.A3)
    golden = load_golden(TableId.A3)
    assert diff_golden(table, table).ok

    recs = list(table.records)
    changed = dict(recs[0].values)
    changed["k3_target"] = "33"
    recs[0] = RowRecord(tuple(changed.items()), recs[0].status)
    recs[1] = replace(recs[1], status="?")
    recs.pop()
    diff = diff_golden(replace(table, records=recs), golden)
    assert diff.matched == 1 and not diff.ok
    assert len(diff.status_mismatches) == 1
    assert [m[2] for m in diff.mismatches if m[2] != ["status"]] == [["k3_target"]]
    assert len(diff.missing) == 1 and not diff.extra
    text = diff.render()
    assert "status mismatch" in text and "field mismatch" in text and "missing" in text


def test_golden_permutation():
    table = build_table(TableId.A4)
    golden = load_golden(TableId.A4)
    perm = golden_permutation(table, golden)
    assert sorted(perm) == list(range(17))
    ordered = in_golden_order(table, golden)
    assert [r.match_key() for r in ordered.records] == [r.match_key() for r in golden.records]
