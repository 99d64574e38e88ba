import json
import subprocess
import sys

import pytest

from spherframe.cli import main


def run(argv, capsys=None):
    code = main(argv)
    return code


def read_all(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_selftest(tmp_path):
    assert run(["selftest", "--jmax", "5", "--output", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "selftest.json").read_text())
    assert rep["passed"] and all(s["passed"] for s in rep["suites"].values())
    assert rep["seed"] == 0


def test_greedy_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["greedy", "--alpha", "1", "--p", "2", "--jmax", "6", "--seed", "7", "--output", str(d)]) == 0
    assert read_all(a) == read_all(b)
    meta = json.loads((a / "rates.json").read_text())
    assert meta["seed"] == 7 and set(meta) == {"alpha", "p", "tau", "slope", "slope_stderr", "seed"}
    assert (a / "rates.csv").read_text().splitlines()[0] == "n,error,ratio"


def test_round_trip(tmp_path, capsys):
    assert run(["analyze", "--jmax", "5", "--degree", "16", "--seed", "4", "--output", str(tmp_path / "an")]) == 0
    assert run(["synthesize", "--input", str(tmp_path / "an" / "tree.csv"), "--output", str(tmp_path / "sy")]) == 0
    err = float(capsys.readouterr().out.split()[-1])
    assert err < 1e-8


def test_round_trip_from_user_function(tmp_path):
    assert run(["analyze", "--jmax", "5", "--degree", "8", "--output", str(tmp_path / "a")]) == 0
    src = tmp_path / "a" / "function.csv"
    assert run(["analyze", "--jmax", "5", "--input", str(src), "--output", str(tmp_path / "b")]) == 0
    assert run(["synthesize", "--input", str(tmp_path / "b" / "tree.csv"), "--output", str(tmp_path / "c")]) == 0


def test_mismatched_file(tmp_path, capsys):
    assert run(["analyze", "--jmax", "4", "--degree", "8", "--output", str(tmp_path)]) == 0
    bad = tmp_path / "function.csv"
    lines = bad.read_text().splitlines()
    bad.write_text("\n".join(lines[:-3]) + "\n")
    assert run(["analyze", "--jmax", "4", "--input", str(bad), "--output", str(tmp_path / "o")]) == 2
    assert "function.csv" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run(["synthesize", "--input", str(tmp_path / "nope.csv")]) == 2
    assert "nope" in capsys.readouterr().err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["greedy", "--p", "abc"])
    assert e.value.code == 2
    assert "--p" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    assert run(["besov", "--dim", "4"]) == 2
    assert "--dim" in capsys.readouterr().err
    assert run(["greedy", "--alpha", "1", "--p", "2", "--tau", "3"]) == 2
    assert "--tau" in capsys.readouterr().err


def test_invariant_failure_exit_one(tmp_path, capsys):
    # the default window misses the localization bound, so this run exits 1
    assert run(["localization", "--jmax", "7", "--output", str(tmp_path)]) == 1
    msg = capsys.readouterr().err
    assert "localization" in msg and "measured" in msg


def test_other_commands(tmp_path):
    assert run(["frame-build", "--jmax", "3", "--output", str(tmp_path / "fb")]) == 0
    assert (tmp_path / "fb" / "level_3.csv").exists()
    assert run(["besov", "--alpha", "0.5", "--p", "2", "--tau", "1", "--n-functions", "4", "--degree", "16",
                "--jmax", "5", "--output", str(tmp_path / "b")]) == 0
    rep = json.loads((tmp_path / "b" / "besov_report.json").read_text())
    assert set(rep) >= {"params", "per_function", "spread_stats", "seed"}
    assert run(["besov", "--alpha", "1", "--p", "inf", "--tau", "inf", "--n-functions", "3", "--degree", "16",
                "--jmax", "5", "--output", str(tmp_path / "b2")]) == 0
    assert json.loads((tmp_path / "b2" / "besov_report.json").read_text())["params"]["p"] == "inf"
    assert run(["mz-check", "--p", "4", "--degree", "8", "--rule-degree", "32", "--output", str(tmp_path / "m")]) == 0
    assert run(["mz-check", "--p", "2", "--degree", "8", "--threads", "1", "--output", str(tmp_path / "m2")]) == 0


def test_mz_check_with_rule_file(tmp_path):
    assert run(["frame-build", "--jmax", "1", "--oversampling", "2", "--output", str(tmp_path)]) == 0
    # level 1 is exact to degree 8, enough for |f|^2 with f of degree 4
    assert run(["mz-check", "--input", str(tmp_path / "level_1.csv"), "--rule-degree", "8", "--degree", "4",
                "--output", str(tmp_path / "m")]) == 0


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "spherframe", "mz-check", "--degree", "4", "--trials", "2",
                          "--output", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
