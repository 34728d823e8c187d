import json
import shutil
import subprocess
import sys

import pytest

from almostfano.cli import run

from conftest import GOLDEN


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_raw_dp_curve(capsys):
    code, out, _ = call(capsys, "enumerate", "--pairing", "dp-curve", "--raw")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "no,r,k3,kf2,g,d,alpha,beta,h3"
    assert len(lines) == 30
    assert any(",7/2,-3/2," in ln for ln in lines)


def test_enumerate_cb_cb(capsys):
    code, out, err = call(capsys, "enumerate", "--pairing", "cb-cb", "--format", "json")
    assert code == 0 and out.strip() == "[]"
    traces = [ln for ln in err.splitlines() if ln.startswith("trace")]
    assert len(traces) == 2


def test_enumerate_all_and_table(capsys):
    code, out, _ = call(capsys, "enumerate", "--pairing", "all")
    assert code == 0 and out.count("# ") == 7
    code, out, _ = call(capsys, "enumerate", "--table", "A3", "--format", "md")
    assert code == 0 and "blowupsing" in out
    code, out, _ = call(capsys, "enumerate", "--table", "a4", "--order", "golden")
    assert out.splitlines()[1].startswith("1,22,6,2,40")


def test_enumerate_disable_filter(capsys):
    _, base, _ = call(capsys, "enumerate", "--table", "A1")
    _, more, _ = call(capsys, "enumerate", "--table", "A1", "--disable-filter", "div8")
    assert len(more.splitlines()) == len(base.splitlines()) + 2


def test_enumerate_writes_out_and_figure(capsys, tmp_path):
    out = tmp_path / "a7.json"
    fig = tmp_path / "a7.png"
    code, stdout, _ = call(capsys, "enumerate", "--table", "A7", "--format", "json",
                           "--out", str(out), "--figure", str(fig))
    assert code == 0 and stdout == ""
    assert len(json.loads(out.read_text())) == 13
    assert fig.read_bytes()[:4] == b"\x89PNG"


def test_verify_all(capsys):
    code, out, _ = call(capsys, "verify")
    assert code == 0
    assert "prop317: 29/29 rows matched" in out
    assert out.count("rows matched") == 9


def test_verify_one_table(capsys):
    code, out, _ = call(capsys, "verify", "--table", "prop317")
    assert code == 0 and out.strip() == "prop317: 29/29 rows matched"


@pytest.mark.parametrize(
    "name,old,new",
    [
        ("A1.csv", "4,16,1,8,4,(0,1^2,2^2)", "4,16,1,8,4,(0,1^2,2^3)"),
        ("A2.csv", "delpezzoconic,+", "delpezzoconic,?"),
        ("A4.csv", "1,22,6,2,40,0,4", "1,22,6,2,40,0,5"),
        ("prop414.csv", "17,22,1,3,2,5,0,3", "17,22,1,3,2,5,1,3"),
    ],
)
def test_verify_detects_single_field_mutation(capsys, tmp_path, name, old, new):
    for f in GOLDEN.glob("*.csv"):
        shutil.copy(f, tmp_path / f.name)
    text = (tmp_path / name).read_text()
    assert old in text
    (tmp_path / name).write_text(text.replace(old, new, 1))
    code, out, err = call(capsys, "verify", "--golden", str(tmp_path))
    assert code == 1
    assert "mismatch" in err or "missing" in err


def test_verify_env_override(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ALMOSTFANO_GOLDEN_DIR", str(tmp_path))
    code, _, err = call(capsys, "verify", "--table", "A5")
    assert code == 1 and "error" in err


def test_chow_eval(capsys):
    code, out, _ = call(capsys, "chow", "eval", "--base", "p2", "--rank", "3", "--chern", "3,4", "--class", "z^4")
    assert (code, out.strip()) == (0, "5")
    code, out, _ = call(capsys, "chow", "eval", "--base", "p1", "--rank", "4", "--chern", "0",
                        "--class", "2z+2h", "--power", "3")
    # (2z+2h)^3 alone is degree 3, one short of top
    assert code == 2
    code, out, _ = call(capsys, "chow", "eval", "--base", "p1", "--rank", "4", "--chern", "0",
                        "--class", "(2z+2h)^3*(2z)")
    assert out.strip() == "48"


def test_chow_rr(capsys, tmp_path):
    data = tmp_path / "q.json"
    data.write_text(json.dumps({"k3": 8, "k2l": 8, "kl2": 0, "l3": 0, "c2l": 4}))
    code, out, _ = call(capsys, "chow", "rr", "--data", str(data), "--x", "1/2", "--y", "0")
    assert (code, out.strip()) == (0, "3")
    data.write_text("{\"bogus\": 1}")
    code, _, _ = call(capsys, "chow", "rr", "--data", str(data), "--x", "1", "--y", "0")
    assert code == 2


def test_catalog(capsys):
    code, out, _ = call(capsys, "catalog", "--index", "3")
    assert code == 0 and "3,2,54,Q" in out
    code, out, _ = call(capsys, "catalog")
    assert "special rows" in out and "highindex" in out


def test_explain_excluded_row(capsys):
    code, out, _ = call(capsys, "explain", "--pairing", "dp-curve", "--row", "22")
    assert code == 0
    rel = next(ln for ln in out.splitlines() if "K.E~^2 relation" in ln)
    assert "0 == 0" in rel and "alpha=7/2" in rel
    assert "x:NO_SECTIONS" in out and "citation:" in out


def test_explain_filtered_row(capsys):
    code, out, _ = call(capsys, "explain", "--pairing", "dp-dp", "--row", "II.5")
    assert code == 0 and "div8: fires (DIV8)" in out


def test_explain_rejected_and_special(capsys):
    code, out, _ = call(capsys, "explain", "--pairing", "dp-conic", "--row", "6")
    assert code == 0 and "KF_FORBIDDEN" in out
    code, out, _ = call(capsys, "explain", "--pairing", "dp-dp", "--row", "highindex")
    assert code == 0 and "status: +" in out


def test_explain_unknown_row(capsys):
    code, _, err = call(capsys, "explain", "--pairing", "dp-dp", "--row", "nope")
    assert code == 2 and "no row" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["enumerate"],
        ["enumerate", "--pairing", "dp-dp", "--table", "A1"],
        ["enumerate", "--pairing", "xx"],
        ["enumerate", "--pairing", "dp-dp", "--bogus"],
        ["verify", "--table", "A9"],
        ["chow", "eval", "--base", "p3", "--rank", "2", "--chern", "1", "--class", "z"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_console_script_runs():
    exe = shutil.which("almostfano")
    cmd = [exe] if exe else [sys.executable, "-m", "almostfano.cli"]
    proc = subprocess.run(cmd + ["verify", "--table", "A3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "4/4 rows matched" in proc.stdout
