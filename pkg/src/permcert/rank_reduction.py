"""Rank reduction of a dual point while preserving its defining functionals.

The n + 1 real functionals P -> v_i^H P v_i and P -> Tr P fix the objective
value. Writing P = U U^H with r columns, any Hermitian r x r direction Delta
annihilated by all of them can be followed from P' = U (I + t Delta) U^H to the
PSD boundary, which drops the rank. A nonzero Delta exists whenever r^2 > n + 1,
so the loop ends with r <= floor(sqrt(n + 1)).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .hermitian import hermitian_basis, quadratic_coefficients
from .relaxation import psd_factor, quadratic_forms

NULL_TOL = 1e-10
TRUNCATE_TOL = 1e-12


@dataclass(frozen=True)
class ReductionStep:
    null_residual: float
    boundary_step: float
    rank_after: int


@dataclass(frozen=True)
class ReductionTrace:
    initial_rank: int
    final_rank: int
    steps: list = field(default_factory=list)
    objective_drift: float = 0.0
    functional_drift: float = 0.0
    aborted: bool = False


def numeric_rank(P, tol=1e-9):
    """Number of eigenvalues of PSD ``P`` above ``tol * lambda_max``."""
    w = np.linalg.eigvalsh(0.5 * (P + np.conj(P).T))
    if w[-1] <= 0:
        return 0
    return int(np.sum(w > tol * w[-1]))


def rank_target(n):
    """Largest r with r^2 <= n + 1."""
    return math.isqrt(n + 1)


def _functional_matrix(V, U, m):
    # restricted to the first m basis directions: any d + 1 of them already
    # contain a null direction, and the slice keeps the SVD at O(d^3)
    B = hermitian_basis(U.shape[1], m)
    rows = quadratic_coefficients(U.conj().T @ V, B)  # Tr(U^H v_i v_i^H U B_k)
    trace_row = np.einsum("ab,kba->k", U.conj().T @ U, B).real  # Tr(U^H U B_k)
    return np.vstack([rows, trace_row]), B


def _drifts(V, P, P_new):
    q0 = quadratic_forms(V, P)
    q1 = quadratic_forms(V, P_new)
    func = float(np.max(np.abs(q1 - q0) / (1.0 + np.abs(q0))))
    tr0 = np.trace(P).real
    func = max(func, abs(np.trace(P_new).real - tr0) / max(tr0, 1.0))
    if np.all(q0 > 0) and np.all(q1 > 0):
        obj0 = float(np.sum(np.log(q0)))
        obj = abs(float(np.sum(np.log(q1))) - obj0) / max(1.0, abs(obj0))
    else:
        obj = math.inf
    return func, obj


def reduce_rank(V, P, tol=NULL_TOL):
    """Lower the rank of feasible ``P`` to at most floor(sqrt(n + 1)).

    Returns ``(P_reduced, trace)``. If a null direction cannot be found to
    tolerance the loop stops, the original ``P`` is returned and the trace is
    flagged ``aborted``.
    """
    V = np.asarray(V, dtype=complex)
    P = 0.5 * (P + P.conj().T)
    n = V.shape[0]
    d = n + 1
    U = psd_factor(P, TRUNCATE_TOL)
    r0 = U.shape[1]
    steps = []
    while U.shape[1] ** 2 > d:
        F, B = _functional_matrix(V, U, d + 1)
        _, sing, Wt = np.linalg.svd(F, full_matrices=True)
        # d x (d + 1) always has a null direction: the last right-singular vector
        x = Wt[-1]
        residual = float(np.linalg.norm(F @ x) / max(sing[0], 1e-300))
        if residual > tol:
            return P, ReductionTrace(r0, r0, steps, 0.0, 0.0, aborted=True)
        Delta = np.einsum("k,kab->ab", x, B)
        mu, W = np.linalg.eigh(0.5 * (Delta + Delta.conj().T))
        # Tr(U^H U Delta) = 0 with U^H U > 0 forces a negative eigenvalue
        t = -1.0 / mu[0]
        lam = 1.0 + t * mu
        keep = lam > TRUNCATE_TOL * lam.max()
        U = (U @ W[:, keep]) * np.sqrt(lam[keep])
        steps.append(ReductionStep(residual, float(t), U.shape[1]))
    P_new = U @ U.conj().T
    P_new = 0.5 * (P_new + P_new.conj().T)
    func, obj = _drifts(V, P, P_new)
    return P_new, ReductionTrace(r0, U.shape[1], steps, obj, func)
