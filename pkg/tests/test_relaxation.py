import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_psd
from permcert.circulant import circulant
from permcert.hermitian import factorize_gram, loewner_leq, random_unitary
from permcert.permanent import permanent_exact
from permcert.relaxation import (SolverOptions, extract_diagonal_certificate, gradient_matrix,
                                 line_search, quadratic_forms, rel, solve_dual)


def rel_2x2_grid(A):
    """min d1 d2 over Diag(d) >= A by a dense 1-D search (oracle)."""
    a, c, b2 = A[0, 0].real, A[1, 1].real, abs(A[0, 1]) ** 2
    if b2 == 0:
        return a * c
    t = np.geomspace(1e-6, 1e6, 400_001) * math.sqrt(b2)
    return float(np.min((a + t) * (c + b2 / t)))


@pytest.mark.parametrize("A", [
    np.array([[1.0, 0.5], [0.5, 1.0]]),
    np.array([[2.0, 1 + 1j], [1 - 1j, 3.0]]),
    np.array([[1.0, 1.0], [1.0, 1.0]]),
    np.array([[5.0, 0.1], [0.1, 0.2]]),
])
def test_rel_2x2_against_grid(A):
    assert math.exp(rel(A).log_rel) == pytest.approx(rel_2x2_grid(A), rel=1e-6)


def test_known_values():
    assert math.exp(rel(circulant([2.0, 1.0, 1.0])).log_rel) == pytest.approx(64.0, rel=1e-9)
    res = rel(np.ones((2, 2)))
    assert math.exp(res.log_rel) == pytest.approx(4.0, rel=1e-9)
    assert np.allclose(res.certificate.d, [2.0, 2.0], rtol=1e-6)
    d = np.array([1.0, 2.0, 3.0])
    assert math.exp(rel(np.diag(d)).log_rel) == pytest.approx(6.0, rel=1e-9)


def test_rank_one_instance():
    # A = v v^H: relaxation equals n^n prod |v_i|^2
    v = np.array([1.0, 2.0, 0.5 + 1j, -1.0])
    res = rel(np.outer(v, v.conj()))
    assert res.log_rel == pytest.approx(4 * math.log(4) + float(np.sum(np.log(np.abs(v) ** 2))), abs=1e-8)


def test_zero_diagonal_short_circuit():
    res = rel(np.diag([1.0, 0.0, 2.0]))
    assert res.log_rel == -math.inf and res.solution is None
    assert res.certificate.log_upper == -math.inf and res.certificate.validated


def test_gradient_matches_finite_differences():
    V = factorize_gram(random_psd(5, 3))
    rng = np.random.default_rng(0)
    P = random_psd(5, 8)
    P *= 5 / np.trace(P).real
    H = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = H + H.conj().T
    f = lambda M: float(np.sum(np.log(quadratic_forms(V, M))))
    h = 1e-6
    fd = (f(P + h * H) - f(P - h * H)) / (2 * h)
    G = gradient_matrix(V, quadratic_forms(V, P))
    assert np.trace(G @ H).real == pytest.approx(fd, rel=1e-6)


def test_line_search_is_argmax():
    rng = np.random.default_rng(4)
    q, s = rng.uniform(0.1, 2, 6), rng.uniform(0.1, 2, 6)
    t = line_search(q, s)
    grid = np.linspace(0, 1, 100_001)
    vals = [np.sum(np.log((1 - g) * q + g * s)) for g in grid]
    assert np.sum(np.log((1 - t) * q + t * s)) >= max(vals) - 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_sandwich_and_certificate(n, seed):
    A = random_psd(n, seed)
    res = rel(A)
    cert = res.certificate
    assert cert.validated
    assert loewner_leq(A, np.diag(cert.d) * (1 + cert.inflation))
    log_per = permanent_exact(A, log=True)
    assert log_per <= res.log_rel + 1e-9 * max(1, abs(res.log_rel))
    assert res.solution.converged and res.solution.gap_ratio <= 1 + 1e-6


def test_weak_duality_every_iterate():
    V = factorize_gram(random_psd(7, 11))
    sol = solve_dual(V)
    assert sol.history
    for rec in sol.history:
        assert rec.log_nu <= rec.log_mu + 1e-12


def test_frank_wolfe_only_mode_stays_feasible():
    V = factorize_gram(random_psd(5, 12))
    sol = solve_dual(V, SolverOptions(method="frank-wolfe", max_iter=200))
    assert np.trace(sol.P).real == pytest.approx(5.0)
    assert np.linalg.eigvalsh(sol.P).min() >= -1e-10
    assert sol.log_nu <= sol.log_mu_bound


def test_any_feasible_point_gives_upper_bound():
    A = random_psd(4, 5)
    V = factorize_gram(A)
    P = random_psd(4, 6)
    P *= 4 / np.trace(P).real
    cert = extract_diagonal_certificate(V, P, A)
    assert cert.validated
    assert cert.log_upper >= rel(A).log_rel - 1e-9


def test_factorization_invariance():
    A = random_psd(6, 21)
    V = factorize_gram(A)
    W = random_unitary(6, np.random.default_rng(3))
    assert rel(A, factor=W @ V).log_rel == pytest.approx(rel(A).log_rel, rel=1e-6)
