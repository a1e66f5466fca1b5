import math

import numpy as np
import pytest

from conftest import random_psd
from permcert.constants import approx_factor
from permcert.hermitian import factorize_gram
from permcert.rank_reduction import numeric_rank, rank_target, reduce_rank
from permcert.relaxation import quadratic_forms


@pytest.mark.parametrize("n", [3, 5, 8, 15, 24])
def test_reduces_full_rank_point(n):
    V = factorize_gram(random_psd(n, n))
    P = random_psd(n, 100 + n)
    P *= n / np.trace(P).real
    P2, trace = reduce_rank(V, P)
    assert not trace.aborted
    assert numeric_rank(P2) <= rank_target(n) == math.isqrt(n + 1)
    assert np.linalg.eigvalsh(P2).min() >= -1e-9
    q0, q1 = quadratic_forms(V, P), quadratic_forms(V, P2)
    assert np.max(np.abs(q1 - q0) / np.abs(q0)) <= 1e-9
    assert np.trace(P2).real == pytest.approx(n, rel=1e-12)
    assert trace.functional_drift <= 1e-9
    assert approx_factor(n, trace.final_rank).log_value >= approx_factor(n, trace.initial_rank).log_value


def test_low_rank_input_untouched():
    V = factorize_gram(random_psd(5, 1))
    u = np.ones(5) / math.sqrt(5)
    P = 5 * np.outer(u, u)
    P2, trace = reduce_rank(V, P)
    assert trace.steps == [] and np.allclose(P, P2)


def test_rank_target():
    assert [rank_target(n) for n in (3, 7, 8, 15, 40)] == [2, 2, 3, 4, 6]
