import json
import subprocess
import sys

import pytest

from mixminimax.cli import main
from mixminimax.family_l2 import positivity_epsilon_bound


def run(argv, capsys):
    code = main(argv, environ={})
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"lemma22", "absorb_identity", "orthonormality", "envelope", "separation",
            "kernel_fourier", "growth", "positivity", "chi2"} <= names
    assert all("margin" in c and "tolerance" in c for c in report["checks"])


def test_verify_names_positivity_when_epsilon_too_large(capsys, tmp_path):
    eps = 20 * positivity_epsilon_bound(2)
    code, _, err = run(["verify", "--regime", "l2", "--m", "2", "--epsilon", str(eps),
                        "--unchecked", "--out", str(tmp_path)], capsys)
    assert code == 1 and "positivity" in err
    assert not json.load(open(tmp_path / "verify.json"))["passed"]


def test_verify_rejects_bad_lemma_pair(capsys):
    code, _, err = run(["verify", "--lemma22-pairs", "2:1"], capsys)
    assert code == 2 and "b > a" in err


@pytest.mark.parametrize("argv", [
    ["rates", "--regime", "l2", "--n-list", "", "--out", "x"],
    ["rates", "--regime", "l2", "--n-list", "1000,100", "--out", "x"],
    ["bound", "--n", "1000"],
    ["bound", "--regime", "tv", "--n", "1000"],
    ["estimate"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bound(capsys, tmp_path):
    code, out, _ = run(["bound", "--regime", "hellinger", "--n", "10000", "--out", str(tmp_path)], capsys)
    cert = json.loads(out)["certificate"]
    assert code == 0 and cert["verified"] and cert["m"] == 2
    assert json.load(open(tmp_path / "bound.json"))["certificate"]["details"]["separation"]


def test_construct(capsys, tmp_path):
    code, _, _ = run(["construct", "--regime", "l2", "--n", "100000", "--out", str(tmp_path)], capsys)
    assert code == 0
    family = json.load(open(tmp_path / "family.json"))["family"]
    assert family["m"] == 3 and family["schedule"]["binding"] == "testing"
    assert (tmp_path / "densities.csv").read_text().count("\n") == 3 + 1 + 241


def test_rates_outputs_and_determinism(capsys, tmp_path):
    argv = ["rates", "--regime", "l2", "--n-list", "1024,2048", "--seed", "3", "--reps", "10"]
    assert run(argv + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run(argv + ["--out", str(tmp_path / "b"), "--workers", "2"], capsys)[0] == 0
    for name in ("lower_bounds.csv", "mise.csv"):
        a = (tmp_path / "a" / name).read_text()
        b = (tmp_path / "b" / name).read_text()
        assert a.splitlines()[3:] == b.splitlines()[3:]
        assert len(a.splitlines()) == 4 + 2
    assert "<polyline" in (tmp_path / "a" / "rates.svg").read_text()


def test_rates_hellinger_has_no_mise_table(capsys, tmp_path):
    assert run(["rates", "--regime", "hellinger", "--n-list", "1000,10000", "--out", str(tmp_path),
                "--no-plot"], capsys)[0] == 0
    assert (tmp_path / "lower_bounds.csv").exists()
    assert not (tmp_path / "mise.csv").exists() and not (tmp_path / "rates.svg").exists()


def test_estimate_prints_csv(capsys):
    code, out, _ = run(["estimate", "--n", "1000", "--reps", "10", "--seed", "1"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[3].startswith("n,h,reps,mise_mean")
    assert lines[4].startswith("1000,")


def test_unwritable_output_is_reported(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["construct", "--regime", "l2", "--n", "1000", "--out", str(blocker / "sub")], capsys)
    assert code == 1 and str(blocker) in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mixminimax", "bound", "--n", "1000"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
