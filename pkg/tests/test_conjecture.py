import math

import numpy as np
import pytest

from conftest import random_psd
from permcert.circulant import circulant
from permcert.conjecture import check_pate, check_vdw_conjecture
from permcert.errors import SizeError
from permcert.permanent import permanent_bruteforce


def test_diagonal_tight_both_ends():
    r = check_vdw_conjecture(np.diag([1.0, 2.0, 3.0]))
    assert r.lower_holds and r.status == "consistent"
    assert r.log_r_lower == pytest.approx(math.log(6)) and r.log_per == pytest.approx(math.log(6))
    assert r.log_nu == pytest.approx(math.log(6))


def test_circulant_example():
    r = check_vdw_conjecture(circulant([2.0, 1.0, 1.0]))
    assert math.exp(r.log_r_lower) == pytest.approx(64.0, rel=1e-8)
    assert 6 / 27 * 64 <= math.exp(r.log_per) <= 64
    assert not r.counterexample_flag


@pytest.mark.parametrize("seed", range(5))
def test_random_n5(seed):
    r = check_vdw_conjecture(random_psd(5, seed), starts=20, seed=seed)
    assert r.lower_holds and not r.counterexample_flag
    assert r.log_r_lower <= r.log_nu + 1e-8
    assert r.status in ("consistent", "unresolved")


def test_pate_k1_equality():
    A = random_psd(3, 1)
    p = check_pate(A, 1)
    assert p.holds and p.lhs_log == pytest.approx(p.rhs_log)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.9, 1.0])
def test_pate_n2_k2_against_bruteforce(c):
    A = np.array([[1.0, c], [c, 1.0]])
    lhs = permanent_bruteforce(np.kron(A, np.ones((2, 2)))).real
    p = check_pate(A, 2)
    assert p.lhs_log == pytest.approx(math.log(lhs))
    assert p.rhs_log == pytest.approx(math.log((1 + c * c) ** 2 * 4))
    assert p.holds


def test_pate_identity_k3():
    p = check_pate(np.eye(2), 3)
    assert math.exp(p.rhs_log) == pytest.approx(36.0)
    lhs = permanent_bruteforce(np.kron(np.eye(2), np.ones((3, 3)))).real
    assert math.exp(p.lhs_log) == pytest.approx(lhs) and p.holds


def test_pate_cap():
    with pytest.raises(SizeError):
        check_pate(np.eye(7), 3)
