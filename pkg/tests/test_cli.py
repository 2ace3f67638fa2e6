import hashlib
import json
import os

import pytest

from erwtree.artifacts import CHECKPOINT_COLUMNS, FLUCT_COLUMNS
from erwtree.cli import main

SIM = ["simulate", "--d1", "1", "--d2", "2", "--p", "0.6", "--steps", "2000",
       "--replicas", "64", "--seed", "5"]


def digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def test_simulate_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(SIM + ["--out-dir", str(out), "--svg"]) == 0
    with open(out / "checkpoints.csv") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == ",".join(CHECKPOINT_COLUMNS)
    assert lines[-1].startswith("2000,")
    with open(out / "fluctuations.csv") as fh:
        flines = fh.read().splitlines()
    assert flines[0] == ",".join(FLUCT_COLUMNS) and len(flines) == 65
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) >= {"config", "derived", "results", "versions"}
    assert summary["derived"]["p_d"] == 0.625
    assert summary["derived"]["regime"] == "subcritical"
    assert summary["derived"]["lambda2"] == pytest.approx((0.6 * 4 - 1) / 3)
    assert summary["derived"]["alpha"] is None
    assert summary["derived"]["r_exponent"] == 0.5
    assert summary["config"]["steps"] == 2000
    assert (out / "fluct_hist.svg").read_text().startswith("<svg")


def test_byte_identical_across_workers(tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(SIM + ["--out-dir", str(a), "--workers", "1"]) == 0
    monkeypatch.setenv("ERW_WORKERS", "3")
    assert main(SIM + ["--out-dir", str(b)]) == 0
    for name in ("checkpoints.csv", "fluctuations.csv", "summary.json"):
        assert digest(a / name) == digest(b / name)


def test_golden_checkpoints(tmp_path):
    """A small seeded run is pinned byte for byte."""
    out = tmp_path / "g"
    assert main(["simulate", "--d1", "0", "--d2", "4", "--p", "0.45", "--steps", "64",
                 "--replicas", "8", "--seed", "2024", "--checkpoints", "16,64",
                 "--out-dir", str(out)]) == 0
    golden = os.path.join(os.path.dirname(__file__), "data", "golden_checkpoints.csv")
    with open(golden) as fh:
        assert (out / "checkpoints.csv").read_text() == fh.read()


@pytest.mark.parametrize("argv", [
    ["simulate", "--d1", "2", "--d2", "0", "--p", "0.5", "--ptilde", "0.1", "--steps", "5",
     "--replicas", "2"],
    ["simulate", "--d1", "1", "--d2", "0", "--p", "0.5", "--steps", "5", "--replicas", "2"],
    ["simulate", "--d1", "2", "--d2", "0", "--variant", "pos", "--steps", "5", "--replicas", "2"],
    ["simulate", "--d1", "2", "--d2", "0", "--p", "1.5", "--steps", "5", "--replicas", "2"],
    ["oracle", "--d1", "2", "--d2", "0", "--p", "0.5", "--n", "13"],
])
def test_usage_errors(argv, capsys, tmp_path):
    assert main(argv + (["--out-dir", str(tmp_path)] if argv[0] == "simulate" else [])) == 2
    assert "error" in capsys.readouterr().err


def test_budget_message(capsys):
    assert main(["oracle", "--d1", "2", "--d2", "0", "--p", "0.5", "--n", "13"]) == 2
    assert "67108864" in capsys.readouterr().err


@pytest.mark.parametrize("argv,pmf", [
    (["--d1", "0", "--d2", "3", "--p", "0.5", "--n", "2"], {"0": 0.5, "2": 0.5}),
    (["--d1", "2", "--d2", "0", "--p", "0.25", "--n", "2"], {"0": 0.25, "2": 0.75}),
    (["--d1", "1", "--d2", "2", "--p", "1", "--n", "3"], {"1": 0.5, "3": 0.5}),
])
def test_oracle_examples(argv, pmf, capsys):
    assert main(["oracle"] + argv) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pmf"] == pytest.approx(pmf)


def test_oracle_compare_mc(tmp_path, capsys):
    assert main(["oracle", "--d1", "1", "--d2", "2", "--variant", "pos", "--ptilde", "0.4",
                 "--n", "6", "--compare-mc", "--replicas", "20000", "--out-dir",
                 str(tmp_path)]) == 0
    out = json.loads((tmp_path / "oracle.json").read_text())
    assert all(abs(z) < 5 for z in out["mc"]["z_scores"].values())


def test_analyze(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--d1", "0", "--d2", "4", "--p", "0.45", "--steps", "20000",
                 "--replicas", "200", "--seed", "1", "--out-dir", str(out)]) == 0
    capsys.readouterr()
    assert main(["analyze", "--out-dir", str(out), "--svg"]) == 0
    rep = json.loads((out / "analysis.json").read_text())
    assert rep["regime"] == "subcritical"
    assert rep["moment"]["theory"] == -0.5
    assert rep["moment"]["n_points"] >= 5
    assert (out / "xi_scatter.csv").exists() and (out / "moment_fit.svg").exists()
    assert main(["analyze", "--out-dir", str(out), "--burn-in", "100000"]) == 2


def test_verify_quick(capsys):
    rc = main(["verify", "--quick"])
    text = capsys.readouterr().out
    assert rc == 0, text
    assert "mutation" in text and "FAIL" not in text
