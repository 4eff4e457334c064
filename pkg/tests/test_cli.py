import json
import subprocess
import sys

import numpy as np
import pytest

from opbell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_counterexample(capsys):
    code, out, _ = run(capsys, "counterexample")
    payload = json.loads(out)
    assert code == 0
    assert payload["verdict"] == "Incomparable"
    np.testing.assert_allclose(payload["lhs"], [[-0.25, -0.25], [-0.25, 0.25]], atol=1e-12, rtol=0)
    np.testing.assert_allclose(payload["rhs"], [[-1.5, -1.0], [-1.0, 0.0]], atol=1e-12, rtol=0)


def test_constant(capsys):
    code, out, _ = run(capsys, "constant", "--f", "power-one-minus:r=3", "--m", "0.1", "--M", "0.5")
    payload = json.loads(out)
    assert code == 0 and payload["method"] == "ClosedForm"
    assert payload["value"] == pytest.approx(1.2851267695006672, rel=1e-14)


def test_constant_beta_tilde(capsys):
    code, out, _ = run(capsys, "constant", "--f", "power:p=0.5", "--m", "0.25", "--M", "1",
                       "--kind", "beta-tilde")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1 / 24, abs=1e-10)


def test_verify_holds(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "verify", "--check", "thm-power", "--trials", "20", "--m", "0.1",
                          "--M", "0.5", "--r", "3", "--map", "all", "--seed", "42", "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema"] == "opbell-report/1"
    assert report["counts"]["Holds"] == 20
    assert "runtime" in json.loads(stdout)


def test_verify_violated_and_replay(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--check", "additive-corollary", "--trials", "60", "--n", "2",
                     "--map", "identity", "--seed", "1", "--out", str(out))
    assert code == 1
    report = json.loads(out.read_text())
    row = report["violations"][0]
    code, stdout, _ = run(capsys, "replay", "--from", str(out), "--index", str(row["index"]))
    again = json.loads(stdout)
    assert code == 1
    assert again["verdict"] == row["verdict"]
    assert again["min_eig_gap"] == row["gap"]


def test_verify_all_unmet(capsys):
    code, _, _ = run(capsys, "verify", "--check", "thm-power", "--trials", "3", "--r", "1.5")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["verify", "--check", "thm-power", "--trials", "0"],
    ["verify", "--check", "nope"],
    ["verify", "--check", "thm-power", "--map", "bogus"],
    ["constant", "--f", "wat", "--m", "0", "--M", "1"],
    ["sweep", "--r", "1:2:0", "--m", "0.1", "--M", "0.5"],
    ["replay", "--from", "/nonexistent.json", "--index", "0"],
    [],
])
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_replay_missing_index(capsys, tmp_path):
    out = tmp_path / "r.json"
    run(capsys, "verify", "--check", "thm-power", "--trials", "3", "--out", str(out))
    assert run(capsys, "replay", "--from", str(out), "--index", "99")[0] == 2


def test_sweep_csv(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--r", "2.5:5:0.5", "--m", "0.1", "--M", "0.5",
                     "--trials", "2", "--out", str(out))
    lines = out.read_text().strip().split("\n")
    assert code == 0
    assert lines[0] == "r,m,M,K,K2,argmax_closed,argmax_grid,worst_gap"
    assert len(lines) == 7


def test_help_documents_columns(capsys):
    assert main(["sweep", "--help"]) == 0
    assert "argmax_grid" in capsys.readouterr().out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opbell", "counterexample"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["check_id"] == "counterexample"
