import subprocess
import sys

import pytest

from tardysched.cli import main
from tardysched.formats import load_records, load_training_data


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert run("generate", "--family", 1, "--n", 15, "--seed", 3, "--count", 30, "--out", root / "inst") == 0
    assert run("label", "--in", root / "inst", "--time-limit", 20, "--out", root / "train.csv") == 0
    assert run("train", "--data", root / "train.csv", "--seed", 0, "--epochs", 3, "--lr", 1e-3,
               "--out", root / "model.json") == 0
    return root


def test_generate_writes_files(workspace):
    files = sorted((workspace / "inst").glob("*.txt"))
    assert len(files) == 30
    assert files[0].read_text().startswith("# tardysched instance")


def test_label_writes_full_features(workspace):
    names, X, y = load_training_data(workspace / "train.csv")
    assert len(names) == 16 and X.shape == (30 * 15, 16) and set(y.tolist()) <= {0, 1}


def test_schedule_prints_order(workspace, capsys):
    inst = sorted((workspace / "inst").glob("*.txt"))[0]
    code = run("schedule", "--instance", inst, "--model", workspace / "model.json",
               "--alpha", 0.5, "--gamma", 5, "--beta", 10)
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("objective ")
    assert len(out.strip().splitlines()) == 3 + 15


def test_calibrate(workspace, capsys):
    code = run("calibrate", "--model", workspace / "model.json", "--data", workspace / "train.csv",
               "--out", workspace / "cal.md")
    assert code == 0
    assert (workspace / "cal.md").read_text().count("\n") == 22


def test_bench(workspace, capsys):
    out = workspace / "bench"
    code = run("bench", "--families", "1,11", "--sizes", "10", "--methods", "rule_based,ga,hba,proposed",
               "--count", 2, "--seed", 4, "--timeout", 30, "--out", out, "--model", workspace / "model.json",
               "--generations", 5)
    assert code == 0
    assert len(load_records(out / "records.csv")) == 16
    assert "| hba | 10 |" in capsys.readouterr().out


def test_usage_errors(workspace, tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("generate", "--family", 1)
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 1
    assert run("generate", "--family", 99, "--n", 5, "--seed", 0, "--out", tmp_path) == 1
    assert run("bench", "--families", "1", "--sizes", "5", "--methods", "proposed", "--out", tmp_path) == 1
    assert run("train", "--data", tmp_path / "missing.csv", "--out", tmp_path / "m.json") == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("# tardysched instance\nformat_version=1\nfamily=1\nseed=0\nn=1\nid,w,p,d,dd\n"
                   "0,1.000000,5.000000,2.000000,6.000000\n")
    assert run("schedule", "--instance", bad, "--model", workspace / "model.json") == 1


def test_infeasible_instance_exit_code(workspace, tmp_path):
    inst = tmp_path / "tight.txt"
    inst.write_text("# tardysched instance\nformat_version=1\nfamily=1\nseed=0\nn=2\nid,w,p,d,dd\n"
                    "0,1.000000,3.000000,3.000000,4.000000\n1,1.000000,3.000000,3.000000,4.000000\n")
    assert run("schedule", "--instance", inst, "--model", workspace / "model.json") == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tardysched.cli", "generate", "--family", "2", "--n", "4",
                           "--seed", "1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(list(tmp_path.glob("*.txt"))) == 1
