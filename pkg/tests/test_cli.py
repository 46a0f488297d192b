import json
import subprocess
import sys
from pathlib import Path

import pytest

from mixedres.cli import main, parse_space

ROOT = Path(__file__).resolve().parents[1]
EXAMPLES = ROOT / "docs" / "examples"


def run(tmp_path, *args, name="r.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out), "--quiet"])
    return code, (out.read_bytes() if out.exists() else None)


def test_cohomology_three_pipelines(tmp_path):
    code, raw = run(tmp_path, "--space", "p1_two_charts d=2", "--task", "cohomology", "--pipelines", "all")
    assert code == 0
    rep = json.loads(raw)
    coh = next(r for r in rep["records"] if r["name"] == "cohomology")
    assert coh["betti"] == {"standard": [3, 0], "thom-sullivan": [3, 0], "mixed": [3, 0]}
    assert rep["artifact"] == "mixedres" and rep["config"]["task"] == "cohomology"


@pytest.mark.parametrize("task", ["cohomology", "verify-thm41", "verify-prop52"])
def test_reports_are_byte_stable(tmp_path, task):
    args = ("--space", "p1_two_charts:d=-1", "--task", task, "--seed", "5")
    _, a = run(tmp_path, *args, name="a.json")
    _, b = run(tmp_path, *args, name="b.json")
    assert a == b


def test_timing_is_opt_in(tmp_path):
    _, plain = run(tmp_path, "--space", "affine_1", "--task", "verify-thm31")
    assert b"seconds" not in plain
    _, timed = run(tmp_path, "--space", "affine_1", "--task", "verify-thm31", "--timing", name="t.json")
    assert "elapsed_seconds" in json.loads(timed)


def test_failing_check_exits_one(tmp_path):
    code, raw = run(tmp_path, "--space", str(EXAMPLES / "bad_overlap.spec"), "--task", "cohomology")
    assert code == 1
    assert json.loads(raw)["status"] == "FAIL"


def test_oracle_failure_exits_one(tmp_path):
    code, _ = run(tmp_path, "--space", "p1_two_charts:d=3", "--window", "0", "--task", "verify-thm41")
    assert code == 1


@pytest.mark.parametrize("args", [
    ["--space", "nope"],
    ["--space", "p1_two_charts:d=x"],
    ["--space", "p1_two_charts:d=1", "--adic-order", "0"],
    ["--space", "p1_two_charts:d=1", "--pipelines", "fast"],
    ["--space", "p1_three_charts:d=0", "--task", "verify-prop52"],
    ["--task", "cohomology"],
])
def test_usage_errors_exit_two(tmp_path, args, capsys):
    assert main(args + ["--quiet"]) == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.spec"
    bad.write_text("[space]\nname = q\nlattice = x\ncharts = 1\n[charts]\n0 = w\n")
    assert main(["--space", str(bad), "--quiet"]) == 2
    assert "bad.spec:6:5" in capsys.readouterr().err


def test_spec_file_space(tmp_path):
    code, raw = run(tmp_path, "--space", str(EXAMPLES / "p1_two_charts.spec"), "--task", "verify-thm33")
    assert code == 0
    names = [r["name"] for r in json.loads(raw)["records"]]
    assert "validate-section" in names and "verify-thm33" in names


def test_parse_space_forms():
    assert parse_space("p1_two_charts:d=2")[0] == parse_space("p1_two_charts d=2")[0]
    assert parse_space("affine_2")[0].name == "affine_2"


def test_text_table(capsys):
    assert main(["--space", "p1_two_charts:d=0", "--task", "verify-thm31"]) == 0
    out = capsys.readouterr().out
    assert "verify-thm31" in out and "overall: PASS" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "mixedres", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "mixedres" in res.stdout
