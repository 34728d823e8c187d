"""Static data: smooth Fano threefolds of Picard number one, rows that no
search produces, and the status ledger.

All of it ships as commented CSV under ``data/``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .invariants import (
    ChernData,
    ConicBundle,
    DelPezzoFibration,
    DivisorToPoint,
    NumericalRow,
    PairingKind,
    SplittingType,
    Status,
    StatusRecord,
    SurfaceType,
    TransformCoefficients,
)


class LedgerGap(LookupError):
    """A raw row that the ledger does not know about."""


def read_data(*parts: str) -> list[dict[str, str]]:
    text = resources.files("almostfano").joinpath("data", *parts).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@dataclass(frozen=True)
class FanoEntry:
    index: int
    h3: int
    label: str

    @property
    def k3(self) -> int:
        return self.index**3 * self.h3


@lru_cache(maxsize=None)
def _fano_entries() -> tuple[FanoEntry, ...]:
    return tuple(
        FanoEntry(int(rec["index"]), int(rec["h3"]), rec["label"])
        for rec in read_data("catalog", "fano_rho1.csv")
    )


def fano_rho1(index: int | None = None) -> tuple[FanoEntry, ...]:
    if index is not None and index not in (1, 2, 3, 4):
        raise ValueError("index must lie in 1..4")
    return tuple(e for e in _fano_entries() if index is None or e.index == index)


def index_one_degrees() -> frozenset[int]:
    return frozenset(e.k3 for e in fano_rho1(1))


@lru_cache(maxsize=None)
def _models() -> dict[int, str]:
    return {int(rec["k3"]): rec["model"] for rec in read_data("catalog", "models.csv")}


def model_note(k3: int, r_x: int) -> str:
    """Known description of the anticanonical model, if any."""
    return _models().get(k3, "") if r_x == 1 else ""


def _parse_side(text: str):
    kind, *args = text.split(":")
    if kind == "dp":
        return DelPezzoFibration(int(args[0]), int(args[1]) if len(args) > 1 else None)
    if kind == "cb":
        return ConicBundle(int(args[0]))
    if kind == "pt":
        l3 = Fraction(args[3]) if len(args) > 3 else None
        return DivisorToPoint(SurfaceType[args[0]], Fraction(args[1]), int(args[2]), l3)
    raise ValueError(f"bad side encoding {text!r}")


@lru_cache(maxsize=None)
def special_cases() -> tuple[NumericalRow, ...]:
    """Rows of index two or three, plus the base-point row."""
    rows = []
    for rec in read_data("catalog", "specials.csv"):
        coeffs = None
        if rec["alpha"]:
            coeffs = TransformCoefficients.from_alpha_beta(Fraction(rec["alpha"]), Fraction(rec["beta"]))
        k3, r_x = int(rec["k3"]), int(rec["r_x"])
        rows.append(
            NumericalRow(
                pairing=PairingKind[rec["pairing"]],
                k3=k3,
                r_x=r_x,
                side_x=_parse_side(rec["side_x"]),
                side_plus=_parse_side(rec["side_plus"]),
                coeffs=coeffs,
                splitting=SplittingType.parse(rec["splitting"]) if rec["splitting"] else None,
                chern=ChernData.parse(rec["chern"]) if rec["chern"] else None,
                status=StatusRecord(Status.EXISTS, None, rec["citation"]),
                key=rec["key"],
                ref=rec["ref"],
                note=model_note(k3, r_x),
            )
        )
    return tuple(rows)


@dataclass(frozen=True)
class LedgerEntry:
    pairing: PairingKind
    key: str
    identity: str
    status: StatusRecord
    ref: str
    chern: ChernData | None = None


@lru_cache(maxsize=None)
def ledger() -> tuple[LedgerEntry, ...]:
    out = []
    for rec in read_data("catalog", "ledger.csv"):
        out.append(
            LedgerEntry(
                pairing=PairingKind[rec["pairing"]],
                key=rec["key"],
                identity=rec["identity"],
                status=StatusRecord.parse(rec["status"], rec["citation"]),
                ref=rec["ref"],
                chern=ChernData.parse(rec["chern"]) if rec["chern"] else None,
            )
        )
    return tuple(out)


@lru_cache(maxsize=None)
def _ledger_index() -> dict:
    index = {}
    for entry in ledger():
        for k in ((entry.pairing, "id", entry.identity), (entry.pairing, "key", entry.key)):
            if k in index:
                raise ValueError(f"duplicate ledger entry {k}")
            index[k] = entry
    return index


def ledger_entry(pairing: PairingKind, identity: str) -> LedgerEntry:
    try:
        return _ledger_index()[(pairing, "id", identity)]
    except KeyError:
        raise LedgerGap(f"no ledger entry for {pairing.value} row {identity}") from None


def ledger_by_key(pairing: PairingKind, key: str) -> LedgerEntry:
    try:
        return _ledger_index()[(pairing, "key", key)]
    except KeyError:
        raise LedgerGap(f"no ledger entry for {pairing.value} key {key!r}") from None


def status_of(pairing: PairingKind, key: str) -> StatusRecord:
    for row in special_cases():
        if row.pairing is pairing and row.key == key:
            return row.status
    return ledger_by_key(pairing, key).status
