import json
import subprocess
import sys
from pathlib import Path

import pytest

from opera.cli import InputError, default_window, main, parse_input
from opera.report import Check, Report

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_flows_text_and_determinism(capsys):
    first = run(capsys, "flows", "--n", "2", "--m", "3")
    second = run(capsys, "flows", "--n", "2", "--m", "3")
    assert first == second
    assert first[0] == 0 and "v1" in first[1]


def test_flows_json_schema(capsys):
    status, out, _ = run(capsys, "flows", "--n", "3", "--m", "2", "--format", "json")
    payload = json.loads(out)
    assert status == 0
    assert payload["command"] == "flows"
    assert payload["config"]["n"] == 3
    assert len(payload["equations"]) == 2
    assert all(set(e) == {"lhs", "rhs"} for e in payload["equations"])


def test_flows_modified(capsys):
    status, out, _ = run(capsys, "flows", "--m", "3", "--modified")
    assert status == 0 and out.count("=") >= 2


def test_latex_output(capsys):
    status, out, _ = run(capsys, "flows", "--n", "3", "--m", "2", "--format", "latex")
    assert status == 0 and "\\begin{aligned}" in out


@pytest.mark.parametrize("argv", [
    ["flows", "--n", "2", "--m", "4"],
    ["flows", "--n", "0"],
    ["verify", "--suite", "nosuch"],
    ["verify", "--window", "0"],
    ["limit", "--order", "2"],
    ["baxter"],
    ["baxter", "--q-poly", "u1"],
    ["canonicalize", "--input", str(DATA / "malformed.json")],
    ["canonicalize", "--input", str(DATA / "missing.json")],
    ["frobnicate"],
])
def test_bad_input_exits_2(capsys, argv):
    status, _, err = run(capsys, *argv)
    assert status == 2
    assert err


def test_malformed_entry_reports_position(capsys):
    status, _, err = run(capsys, "canonicalize", "--input", str(DATA / "malformed.json"))
    assert "column 3" in err and "entry (1,2)" in err


def test_canonicalize_files(capsys):
    status, out, _ = run(capsys, "canonicalize", "--input", str(DATA / "sl3_gauged.json"), "--format", "json")
    assert status == 0
    assert len(json.loads(out)["equations"]) >= 2


def test_miura_file(capsys):
    status, out, _ = run(capsys, "miura", "--input", str(DATA / "miura_sl2.json"))
    assert status == 0 and "u1^2" in out


def test_baxter_linear(capsys):
    status, out, _ = run(capsys, "baxter", "--q-poly", "1 - z")
    assert status == 0 and "true" in out


def test_qchar_and_qmiura(capsys):
    status, out, _ = run(capsys, "qchar", "--n", "3")
    assert status == 0 and "matches first fundamental character" in out
    status, out, _ = run(capsys, "qmiura", "--n", "2")
    assert status == 0


def test_verify_quick_suite(capsys):
    status, out, _ = run(capsys, "verify", "--suite", "qchar")
    assert status == 0 and "checks passed" in out
    status, out, _ = run(capsys, "verify", "--suite", "qbracket", "--window", "3", "--format", "json")
    assert status == 0 and json.loads(out)["suite"] == "qbracket"


def test_window_environment(monkeypatch):
    monkeypatch.delenv("OPERA_DEFAULT_WINDOW", raising=False)
    assert default_window() == 12
    monkeypatch.setenv("OPERA_DEFAULT_WINDOW", "5")
    assert default_window() == 5
    monkeypatch.setenv("OPERA_DEFAULT_WINDOW", "five")
    with pytest.raises(InputError):
        default_window()


def test_bad_environment_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("OPERA_DEFAULT_WINDOW", "-3")
    status, _, err = run(capsys, "verify", "--suite", "qchar")
    assert status == 2 and "OPERA_DEFAULT_WINDOW" in err


def test_parse_input_kinds():
    assert parse_input(str(DATA / "sl2_canonical.json")).n == 2
    assert parse_input(str(DATA / "miura_sl2.json"), kind="miura").n == 2
    with pytest.raises(InputError):
        parse_input(str(DATA / "sl2_canonical.json"), kind="miura")


def test_failing_report_sets_exit_status():
    r = Report("demo", [Check.of("ok", True, ""), Check.of("bad", False, "x_1 & y")])
    assert r.exit_status == 1
    assert "1/2 checks passed" in r.to_text()
    assert "\\&" in r.to_latex()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opera", "flows", "--m", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "v1" in proc.stdout
