from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from bratteli_irs import cli, verify
from bratteli_irs.verify import CheckResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = text.splitlines()
    assert lines[-1].startswith("# seed=") and "tool-version=" in lines[-1]
    return list(csv.reader(lines[:-1]))


def test_info_odometer(capsys):
    code, out, _ = run(capsys, "info", "--diagram", "odometer:2", "--levels", "1..5")
    assert code == 0
    table = rows(out)
    assert table[0][:4] == ["level", "vertices", "path_counts", "total_paths"]
    assert [r[3] for r in table[1:]] == ["2", "4", "8", "16", "32"]


def test_info_polynomial_window_unknown(capsys):
    code, out, _ = run(capsys, "info", "--diagram", "polynomial-example", "--levels", "1..2", "--search", "8")
    assert code == 0
    assert [r[5] for r in rows(out)[1:]] == ["unknown", "unknown"]


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "d.json"
    bad.write_text('{"root_edges": [1, 1]\n "matrices": []}')
    code, _, err = run(capsys, "info", "--diagram", str(bad))
    assert code == 2 and "line 2 column" in err


def test_diagram_file(tmp_path, capsys):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"root_edges": [1, 1], "matrices": [[[1, 1], [1, 1]]], "continuation": "stationary"}))
    code, out, _ = run(capsys, "info", "--diagram", str(f), "--levels", "3")
    assert code == 0 and rows(out)[1][2] == "4 4"


def test_measures_csv_and_json_roundtrip(tmp_path, capsys):
    code, out, _ = run(capsys, "measures", "--diagram", "all-ones:2", "--depth", "3")
    assert code == 0
    table = rows(out)
    assert table[0] == ["measure", "level", "vertex", "q", "hq"]
    assert table[-1] == ["0", "3", "1", "1/8", "1/2"]
    mfile = tmp_path / "m.json"
    assert cli.main(["measures", "--diagram", "all-ones:2", "--depth", "4", "--json", "--out", str(mfile)]) == 0
    code, out, _ = run(capsys, "char", "--diagram", "all-ones:2", "--measure", str(mfile), "--alpha", "1", "--element", "level=2; v0:(0 1)")
    assert code == 0 and rows(out)[1][2] == "1/2"


def test_char_identity_is_one(capsys):
    code, out, _ = run(capsys, "char", "--diagram", "odometer:2", "--alpha", "2", "--element", "level=3")
    assert code == 0 and rows(out)[1][2] == "1"
    code, out, _ = run(capsys, "char", "--diagram", "odometer:2", "--regular", "--element", "level=1; v0:(0 1)")
    assert rows(out)[1][2] == "0"


def test_char_float_mode(capsys):
    code, out, _ = run(capsys, "char", "--diagram", "odometer:2", "--mode", "float", "--alpha", "1", "--element", "level=2; v0:(0 1)")
    assert code == 0 and float(rows(out)[1][2]) == 0.5


def test_char_bad_element_exit_2(capsys):
    code, _, err = run(capsys, "char", "--diagram", "odometer:2", "--element", "level=2; v0:(0 9)")
    assert code == 2 and "error" in err


def test_avg_schema(capsys):
    code, out, _ = run(capsys, "avg", "--diagram", "odometer:2", "--alpha", "1", "--levels", "1..3")
    assert code == 0
    table = rows(out)
    assert table[0] == ["level", "subgroup_order", "exact_or_mc", "value", "std_err"]
    assert [r[3] for r in table[1:]] == ["1/2", "1/4", "1/8"]


def test_avg_past_caps_needs_seed(capsys):
    code, _, err = run(capsys, "avg", "--diagram", "odometer:2", "--levels", "9")
    assert code == 2 and "exceed" in err


def test_sample_irs_requires_seed(capsys):
    code, _, err = run(capsys, "sample-irs", "--diagram", "odometer:2", "--alpha", "1", "--element", "level=1; v0:(0 1)")
    assert code == 2 and "--seed" in err


def test_sample_irs_output(capsys):
    argv = ["sample-irs", "--diagram", "odometer:2", "--alpha", "2", "--element", "level=2; v0:(0 1)", "--samples", "5000", "--seed", "8"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    table = rows(out)
    assert table[0] == ["quantity", "estimate", "std_err", "exact_reference", "collision_rate"]
    assert [r[0] for r in table[1:]] == ["chi", "chi_prime"]
    assert table[1][3] == "1/4"
    assert out.splitlines()[-1] == "# seed=8, workers=1, tool-version=0.1.0"
    assert run(capsys, *argv)[1] == out


def test_verify_hermite_prints_labeling(capsys):
    code, out, _ = run(capsys, "verify", "hermite")
    assert code == 0 and rows(out)[1] == ["hermite", "pass", "labeling=row0-bottom"]


def test_verify_failure_exit_1(monkeypatch, capsys):
    bad = CheckResult("iep", False, [{"check": "iep", "case": "forced", "value": 1, "reference": 0, "ok": False}])
    monkeypatch.setitem(verify.RUNNERS, "iep", lambda: bad)
    code, out, _ = run(capsys, "verify", "iep")
    assert code == 1
    assert rows(out)[1] == ["iep", "forced", "1", "0", "False"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bratteli_irs", "info", "--diagram", "odometer:2", "--levels", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("level,")
    proc = subprocess.run([sys.executable, "-m", "bratteli_irs", "info"], capture_output=True, text=True)
    assert proc.returncode == 2
