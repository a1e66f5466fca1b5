"""CLI exit codes and byte-identical golden outputs.

Regenerate the golden files with ``PERMCERT_REGEN_GOLDEN=1 pytest tests/test_cli.py``.
"""

import json
import math
import os
from pathlib import Path

import pytest

from permcert.cli import main

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "certify_circulant.json": ["certify", "--circulant", "2,1,1", "--exact", "--seed", "0"],
    "certify_random.json": ["certify", "--random", "6", "3", "--exact", "--seed", "1"],
    "solve_random.json": ["solve", "--random", "5", "2"],
    "round_random.json": ["round", "--random", "6", "2", "--samples", "1000", "--seed", "4"],
    "rank_growth.csv": ["rank-growth", "--n-list", "3,5", "--instances", "3", "--seed", "0", "--format", "csv"],
    "conjecture_batch.csv": ["conjecture", "--random", "4", "0", "--batch", "3", "--starts", "5", "--format", "csv"],
    "pate.json": ["pate", "--circulant", "1,0.4", "--k", "2"],
    "estimate_circulant.json": ["estimate", "--circulant", "2,1,1", "--samples", "20000", "--seed", "7"],
}


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else None


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path):
    code, text = run(CASES[name], tmp_path)
    assert code == 0
    path = GOLDEN / name
    if os.environ.get("PERMCERT_REGEN_GOLDEN"):
        path.write_text(text)
    assert text == path.read_text()
    # a second run is byte-identical too
    assert run(CASES[name], tmp_path, "again")[1] == text


def test_certify_circulant_values(tmp_path):
    obj = json.loads(run(CASES["certify_circulant.json"], tmp_path)[1])
    assert math.exp(obj["log_upper"]) == pytest.approx(64.0, rel=1e-6)
    assert math.exp(obj["log_per_exact"]) == pytest.approx(16.0)
    assert obj["contained"] and obj["validated"]


def test_non_psd_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 2, "entries": [[1, 2], [2, 1]]}')
    assert main(["certify", "--input", str(p)]) == 1
    assert "not positive semidefinite" in capsys.readouterr().err


def test_bad_json_and_missing_file_exit_1(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["solve", "--input", str(p)]) == 1
    assert main(["solve", "--input", str(tmp_path / "none.json")]) == 1


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["certify"])
    assert exc.value.code == 1


def test_exact_cap_skipped_with_warning(tmp_path, caplog):
    code, text = run(["certify", "--random", "22", "0", "--exact", "--k-rounds", "4"], tmp_path)
    assert code == 0
    obj = json.loads(text)
    assert "log_per_exact" not in obj and obj["log_upper"] is not None
    assert "exceeds the exact cap" in caplog.text


def test_seed_env_fallback(tmp_path, monkeypatch):
    args = ["round", "--random", "5", "1"]
    monkeypatch.setenv("PERMCERT_SEED", "9")
    a = run(args, tmp_path, "a")[1]
    b = run(args + ["--seed", "9"], tmp_path, "b")[1]
    assert a == b
    monkeypatch.setenv("PERMCERT_SEED", "x")
    assert main(args) == 1


def test_pate_n2_holds(tmp_path):
    obj = json.loads(run(["pate", "--circulant", "1,0.5", "--k", "2"], tmp_path)[1])
    assert obj["holds"]


def test_conjecture_diagonal(tmp_path):
    p = tmp_path / "d.json"
    p.write_text('{"n": 3, "entries": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]}')
    obj = json.loads(run(["conjecture", "--input", str(p)], tmp_path)[1])
    assert obj["status"] == "consistent" and obj["lower_holds"]
    assert obj["log_r_lower"] == pytest.approx(math.log(6))


def test_estimate_identity(tmp_path):
    obj = json.loads(run(["estimate", "--circulant", "1,0,0", "--samples", "100000", "--exact"], tmp_path)[1])
    assert obj["within_3_std_error"]
