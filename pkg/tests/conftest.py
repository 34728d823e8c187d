import re
from fractions import Fraction
from pathlib import Path

import pytest

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "almostfano" / "data" / "golden"

_COMMA = re.compile(r",(?![^()]*\))")


def read_golden(name: str) -> list[dict[str, str]]:
    """Independent reader for the golden csv files (regex, not the package parser)."""
    lines = [ln for ln in (GOLDEN / f"{name}.csv").read_text().splitlines() if ln.strip()]
    head = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        fields = _COMMA.split(ln)
        assert len(fields) == len(head), ln
        out.append(dict(zip(head, fields)))
    return out


def as_int_row(rec: dict[str, str], keys) -> tuple:
    return tuple(Fraction(rec[k]) for k in keys)


@pytest.fixture(scope="session")
def prop317():
    return read_golden("prop317")


@pytest.fixture(scope="session")
def prop414():
    return read_golden("prop414")
