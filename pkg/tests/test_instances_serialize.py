import json
import math
from pathlib import Path

import numpy as np
import pytest

from permcert.errors import ParseError
from permcert.instances import InstanceSpec, random_instance
from permcert.serialize import dumps, load_matrix, matrix_from_obj, matrix_to_obj, rows_to_csv

GOLDEN = Path(__file__).parent / "golden"


def test_diagonal_and_circulant():
    assert np.array_equal(random_instance(InstanceSpec("diagonal", params={"d": (1, 2, 3)})), np.diag([1, 2, 3]))
    A = random_instance(InstanceSpec("circulant", params={"first_row": (2.0, 1.0, 1.0)}))
    assert np.array_equal(A, [[2, 1, 1], [1, 2, 1], [1, 1, 2]])


def test_random_gaussian_psd_and_deterministic():
    spec = InstanceSpec("random-gaussian", 6, 3)
    A = random_instance(spec)
    assert np.array_equal(A, random_instance(spec))
    assert np.allclose(A, A.T) and np.linalg.eigvalsh(A).min() > -1e-10
    assert not np.array_equal(A, random_instance(InstanceSpec("random-gaussian", 6, 4)))


def test_random_gaussian_golden():
    A = random_instance(InstanceSpec("random-gaussian", 4, 7))
    golden = (GOLDEN / "random_gaussian_n4_seed7.json").read_text()
    assert dumps(matrix_to_obj(A)) == golden


def test_rank1_instance():
    A = random_instance(InstanceSpec("rank1", 4, 1))
    assert np.linalg.matrix_rank(A) == 1


def test_unknown_kind():
    with pytest.raises(ParseError):
        random_instance(InstanceSpec("wishart", 3))


def test_matrix_json_roundtrip(tmp_path):
    A = np.array([[2.0, 1 + 1j], [1 - 1j, 3.0]])
    p = tmp_path / "m.json"
    p.write_text(dumps(matrix_to_obj(A)))
    assert np.array_equal(load_matrix(p), A)
    real = matrix_from_obj({"n": 2, "entries": [[1, 0.5], [0.5, 1]]})
    assert real.dtype == float


@pytest.mark.parametrize("obj", [
    {"n": 3, "entries": [[1, 0], [0, 1]]},
    {"entries": [[1, "a"], [0, 1]]},
    {"n": 2},
    [1, 2],
])
def test_bad_matrix_json(obj):
    with pytest.raises(ParseError):
        matrix_from_obj(obj)


def test_dumps_nonfinite_and_sorted():
    text = dumps({"b": -math.inf, "a": np.float64(1.5), "c": np.array([1, 2])})
    assert json.loads(text) == {"a": 1.5, "b": None, "c": [1, 2]}
    assert text.index('"a"') < text.index('"b"')


def test_csv_header():
    text = rows_to_csv([{"x": 1, "y": None}], ["x", "y"])
    assert text == "x,y\n1,\n"
