import json

import pytest

from torusgap.cli import main
from torusgap.reporting import read_csv

SMALL = """
law: uniform
n: 256
t: [0.1, 0.5]
lemma1: {scale: 3.0, counts: [32, 33]}
tolerances: {sharpness: 1.0e-3}
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL)
    return path


def test_gap_l2(tmp_path, capsys):
    assert main(["gap", "--law", "uniform", "--t", "0.1", "--p", "2", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "gap.json").read_text())
    assert doc["gap"] == pytest.approx(0.064511, abs=1e-6)
    assert doc["version"] and doc["config_hash"]
    assert "0.0645" in capsys.readouterr().out


def test_gap_linf(tmp_path):
    assert main(["gap", "--t", "0.5", "--p", "inf", "--n", "64", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "gap.json").read_text())["gap"] == pytest.approx(1.0)


def test_counterexample(tmp_path):
    rc = main(["counterexample", "--atom", "0.5:1", "--t", "0.5", "--eps", "1e-9",
               "--out", str(tmp_path)])
    assert rc == 0
    doc = json.loads((tmp_path / "counterexample.json").read_text())
    assert doc["n"] == 4 and doc["residual"] < 1e-15


def test_counterexample_not_found(tmp_path):
    rc = main(["counterexample", "--atom", "0.7071067811865476:1", "--t", "1", "--eps", "1e-9",
               "--n-max", "50", "--out", str(tmp_path)])
    assert rc == 1


def test_sweep_and_report(tmp_path, small_config, capsys):
    out = tmp_path / "run"
    assert main(["sweep", "--config", str(small_config), "--out", str(out)]) == 0
    rows = read_csv(out / "sweep.csv")
    assert len(rows) == 6 and {r["p"] for r in rows} == {"1", "2", "inf"}
    assert (out / "sweep.csv").read_text().startswith("# torusgap ")
    summary = tmp_path / "summary"
    assert main(["report", "--inputs", str(out), "--out", str(summary)]) == 0
    table = read_csv(summary / "summary.csv")
    assert [float(r["t"]) for r in table] == [0.1, 0.5]
    assert float(table[1]["c_est_pinf"]) == pytest.approx(4.0)


def test_verify_pass(tmp_path, small_config):
    assert main(["verify", "--config", str(small_config), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["summary"]["failed"] == 0
    assert len(list((tmp_path / "checks").glob("*.csv"))) == doc["summary"]["total"]


def test_verify_failure_names_check(tmp_path, small_config, capsys):
    small_config.write_text(SMALL.replace("1.0e-3", "1.0e-15"))
    assert main(["verify", "--config", str(small_config), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "FAILED sharpness" in err and "checks/" in err


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("TORUSGAP_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["gap", "--t", "0.2", "--n", "64"]) == 0
    assert (tmp_path / "env" / "gap.json").exists()


def test_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("law: {kind: atoms, atoms: [[0, 0.5]]}\nn: 3\n")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "law.atoms" in err and "n:" in err


def test_lemma1(tmp_path):
    assert main(["lemma1", "--law", "uniform", "--C", "3", "--counts", "32,40",
                 "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "lemma1.csv")
    assert [int(r["n"]) for r in rows] == [32, 40]
    assert min(float(r["goodness"]) for r in rows) >= 0.99
