"""Circulant instances, where the relaxation has a rank-one optimum.

For a circulant PSD matrix the scalar certificate D = lambda_max(A) I is
optimal, so log rel(A) = n log lambda_max(A), and the dual optimum is
P = n w w^H for a unit top eigenvector w of V V^H.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hermitian import as_hermitian, check_hpsd, factorize_gram
from .rank_reduction import numeric_rank


def circulant(first_row):
    """Matrix whose row i is ``first_row`` cyclically shifted right by i."""
    c = np.asarray(first_row)
    n = c.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def is_circulant(A, tol=1e-12):
    """True iff A[i, j] depends only on (j - i) mod n, within ``tol`` relative."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(float(np.max(np.abs(A))), 1e-300)
    return bool(np.max(np.abs(A - circulant(A[0]))) <= tol * scale)


def circulant_eigenvalues(first_row):
    """Eigenvalues sum_k c_k exp(2 pi i jk / n), j = 0..n-1, by a direct DFT.

    Eigenvector j is (1, w^j, w^{2j}, ...) / sqrt(n) with w = exp(2 pi i / n).
    """
    c = [complex(x) for x in first_row]
    n = len(c)
    return np.array([
        sum(c[k] * cmath.exp(2j * math.pi * j * k / n) for k in range(n)) for j in range(n)
    ])


@dataclass(frozen=True)
class CirculantSolution:
    P_star: np.ndarray
    log_rel: float
    lam_max: float
    slackness_residual: float


def solve_circulant(A):
    """Closed-form relaxation value and rank-one dual optimum for circulant A."""
    A = as_hermitian(A)
    if not is_circulant(A):
        raise DomainError("solve_circulant needs a circulant matrix")
    if not check_hpsd(A):
        raise DomainError("solve_circulant needs a positive semidefinite matrix")
    n = A.shape[0]
    eig = circulant_eigenvalues(A[0]).real
    j = int(np.argmax(eig))
    lam = float(eig[j])
    if lam <= 0:
        raise DomainError("circulant matrix is zero")
    # the DFT vectors diagonalize both A and its Hermitian square root
    w = np.exp(2j * math.pi * j * np.arange(n) / n) / math.sqrt(n)
    P = n * np.outer(w, w.conj())
    V = factorize_gram(A)
    VVh = V @ V.conj().T
    slack = abs(float(np.trace(P @ VVh).real) - n * lam)
    return CirculantSolution(P, n * math.log(lam), lam, slack)


def rank_bound_structural(A, tol=1e-9):
    """Upper bound on the rank of some optimal dual point: rank(A)."""
    return numeric_rank(as_hermitian(A), tol)
