from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from uag.cli import main, run
from uag.corpus import corpus_files

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_lists_three_points(capsys):
    code, out, _ = _run(capsys, "solve", str(CORPUS / "sl2-leq.prob"))
    assert code == 0
    assert "3 points" in out and "[[0, 0], [0, 1], [1, 1]]" in out


def test_irreducible_gives_decomposition_hint(capsys):
    code, out, _ = _run(capsys, "irreducible", str(CORPUS / "sl2-square.prob"), "--format", "structured")
    assert code == 1
    rep = json.loads(out)
    assert rep["result"]["hint"]["components"] == [[[0, 0], [0, 1], [1, 1]], [[0, 0], [1, 0], [1, 1]]]


def test_casestudy(capsys):
    code, out, _ = _run(capsys, "casestudy", "example5", "--depth", "3", "--budget", "20",
                        "--format", "structured")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "all checks pass"
    assert all(c["passed"] for c in rep["result"]["checks"].values())


def test_report_fields(capsys):
    code, out, _ = _run(capsys, "decompose", str(CORPUS / "sl2-square.prob"), "--format", "structured")
    rep = json.loads(out)
    assert set(rep) == {"tool", "version", "command", "input_digest", "wall_time", "result", "verdict"}
    assert rep["wall_time"] is None and rep["input_digest"].startswith("sha256:")
    assert rep["result"]["subdirect"]["passed"]


def test_timing_flag(capsys):
    _, out, _ = _run(capsys, "solve", str(CORPUS / "sl2-leq.prob"), "--format", "structured", "--timing")
    assert isinstance(json.loads(out)["wall_time"], float)


@pytest.mark.parametrize("cmd", ["solve", "radical", "closure", "coordalg", "irreducible", "decompose",
                                 "classify", "lab"])
def test_structured_reports_are_byte_identical(cmd):
    for path in corpus_files():
        argv = [cmd, str(path), "--format", "structured"]
        c1, r1 = run(argv)
        c2, r2 = run(argv)
        assert c1 == c2 and r1.to_json() == r2.to_json()
        assert c1 in (0, 1, 2)


def test_usage_errors(capsys):
    assert _run(capsys, "nonsense")[0] == 2
    assert _run(capsys, "solve")[0] == 2
    assert _run(capsys, "solve", str(CORPUS / "missing.prob"))[0] == 2


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.prob"
    bad.write_text("language { m/2 }\nvars (x)\nsystem { m(x) = x; }\n")
    code, _, err = _run(capsys, "solve", str(bad))
    assert code == 2 and "expects 2" in err


def test_radical_query(capsys):
    code, out, _ = _run(capsys, "radical", str(CORPUS / "sl2-leq.prob"), "--query", "m(x, y) = x")
    assert code == 0
    code, _, _ = _run(capsys, "radical", str(CORPUS / "sl2-leq.prob"), "--query", "x = y")
    assert code == 1


def test_lab_violation(capsys):
    code, out, _ = _run(capsys, "lab", str(CORPUS / "example5-lab.prob"), "--format", "structured")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "violation"


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "uag.cli", "solve", str(CORPUS / "sl2-leq.prob")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "3 points" in proc.stdout
