import json
import subprocess
import sys
from pathlib import Path

import pytest

from cfcsolve.cli import (EXIT_DATA, EXIT_INCONSISTENT, EXIT_OK, EXIT_UNDECIDED, EXIT_USAGE, run)

GOLDEN = Path(__file__).parent / "golden"

EXAMPLES = [
    (["analyze", "H2(-1)"], "analyze_h2.json", EXIT_OK),
    (["decide", "H4(1)", "--m", "3"], "decide_h4.json", EXIT_UNDECIDED),
    (["solve", "J2 + H2(-1)", "--m", "2"], "solve_j2_h2.json", EXIT_OK),
]


def _run(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,golden,code", EXAMPLES, ids=[g for _, g, _ in EXAMPLES])
def test_golden_outputs(capsys, argv, golden, code):
    got_code, out, _ = _run(capsys, argv)
    assert got_code == code
    assert out == (GOLDEN / golden).read_text()


def test_golden_contents():
    a = json.loads((GOLDEN / "analyze_h2.json").read_text())
    assert (a["tau"], a["upsilon"], a["min_bound"]) == (1, 0, 0)
    d = json.loads((GOLDEN / "decide_h4.json").read_text())
    assert d["status"] == "Undecided"
    s = json.loads((GOLDEN / "solve_j2_h2.json").read_text())
    assert s["status"] == "Consistent" and s["residual"] == 0.0 and s["mode"] == "exact"


def test_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "cfcsolve", "analyze", "H2(-1)"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "analyze_h2.json").read_text()


def test_inconsistent_exit(capsys):
    code, out, _ = _run(capsys, ["decide", "H2(-1)", "--m", "1"])
    assert code == EXIT_INCONSISTENT
    assert json.loads(out)["status"] == "Inconsistent"


def test_invalid_block_is_data_error(capsys):
    code, _, err = _run(capsys, ["analyze", "H2(1)"])
    assert code == EXIT_DATA
    assert json.loads(err)["error"] == "InvalidBlock"


@pytest.mark.parametrize("argv", [[], ["solve", "J2"], ["decide", "J2", "--m", "1", "--B", "x"],
                                  ["solve", "J2", "--m", "-1"], ["bogus"]])
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == EXIT_USAGE
    assert json.loads(err)["exit_code"] == EXIT_USAGE


def test_mu_note_in_output(capsys):
    code, out, _ = _run(capsys, ["analyze", "H4(1/2)"])
    assert code == EXIT_OK
    obj = json.loads(out)
    assert obj["blocks"] == "H4(2)" and obj["notes"]


def test_solve_then_verify(tmp_path, capsys):
    xfile = tmp_path / "x.json"
    code, _, _ = _run(capsys, ["solve", "J5 + G3 + H2(-1)", "--m", "3", "--out", str(xfile)])
    assert code == EXIT_OK
    code, out, _ = _run(capsys, ["verify", "J5 + G3 + H2(-1)", str(xfile), "--m", "3"])
    assert code == EXIT_OK and json.loads(out)["ok"]


def test_solve_with_B_file(tmp_path, capsys):
    bfile = tmp_path / "b.csv"
    bfile.write_text("0,1\n1,0\n")
    code, out, _ = _run(capsys, ["solve", "J3", "--B", str(bfile), "--no-chain"])
    assert code == EXIT_OK
    obj = json.loads(out)
    assert "chain" not in obj and obj["status"] == "Consistent"


def test_congruence_command(capsys):
    code, out, _ = _run(capsys, ["congruence", "G3", "G3~"])
    assert code == EXIT_OK
    assert json.loads(out)["congruent"] is True
    code, out, _ = _run(capsys, ["congruence", "G2", "J1 + G1"])
    assert code in (EXIT_INCONSISTENT, EXIT_DATA)


def test_reduce_command(capsys):
    code, out, _ = _run(capsys, ["reduce", "G3~ + H2(-1)*2"])
    obj = json.loads(out)
    assert code == EXIT_OK and obj["case"] == "C1"


def test_text_format(capsys):
    code, out, _ = _run(capsys, ["analyze", "J3 + G1", "--format", "text"])
    assert code == EXIT_OK
    assert "tau: 3" in out


def test_tolerance_env(monkeypatch, capsys):
    monkeypatch.setenv("CFCSOLVE_TOLERANCE", "abc")
    code, _, _ = _run(capsys, ["solve", "J3", "--m", "2"])
    assert code == EXIT_USAGE
