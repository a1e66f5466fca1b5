"""Dense complex Hermitian linear algebra.

Matrices are plain ``numpy`` arrays. A Gram factor ``V`` of ``A`` satisfies
``A = V^H V``; its columns ``V[:, i]`` are the vectors v_i.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, NumericError

HERMITIAN_TOL = 1e-12
RECONSTRUCT_TOL = 1e-10
CLAMP_TOL = 1e-10
SCALE_FLOOR = 1e-14


class EigDecomposition(NamedTuple):
    """Eigenvalues in descending order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        E = self.eigenvectors
        return (E * self.eigenvalues) @ E.conj().T


@dataclass(frozen=True)
class HpsdReport:
    """Outcome of :func:`check_hpsd`; truthy iff the matrix passed."""

    is_hpsd: bool
    min_eigenvalue: float
    max_eigenvalue: float
    threshold: float

    def __bool__(self):
        return self.is_hpsd


def _square(M, name="matrix"):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square 2-D array, got shape {M.shape}")
    return M


def as_hermitian(M, tol=HERMITIAN_TOL):
    """Validate ``M`` as Hermitian and return it as a complex array.

    The check is relative to the largest entry magnitude. The returned array
    is exactly Hermitian (the antihermitian round-off part is removed).
    """
    M = _square(M).astype(complex)
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    scale = max(np.max(np.abs(M)), SCALE_FLOOR)
    skew = np.max(np.abs(M - M.conj().T))
    if skew > tol * scale:
        raise DomainError(f"matrix is not Hermitian (max |M - M^H| = {skew:.3g})")
    return 0.5 * (M + M.conj().T)


def _phase_fix(E):
    # first component that is not round-off becomes real positive
    E = E.copy()
    for j in range(E.shape[1]):
        col = E[:, j]
        mags = np.abs(col)
        idx = np.flatnonzero(mags > 1e-10 * mags.max())[0]
        E[:, j] = col * (np.conj(col[idx]) / mags[idx])
    return E


def eigh(M):
    """Hermitian eigendecomposition with descending eigenvalues.

    Each eigenvector is scaled by a unit phase so that its first non-negligible
    component is real and positive. Backed by LAPACK through ``numpy``.
    """
    M = as_hermitian(M)
    try:
        w, E = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition did not converge: {exc}") from exc
    order = np.arange(len(w))[::-1]
    return EigDecomposition(w[order].copy(), _phase_fix(E[:, order]))


def eigvalsh(M):
    """Eigenvalues of a Hermitian matrix in descending order."""
    try:
        return np.linalg.eigvalsh(as_hermitian(M))[::-1]
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc


def check_hpsd(M, tol=1e-9):
    """Test ``M`` for positive semidefiniteness.

    Passes iff the smallest eigenvalue is at least ``-tol * max(1, |lambda|_max)``.
    """
    w = eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(w))))
    threshold = -tol * scale
    return HpsdReport(bool(w[-1] >= threshold), float(w[-1]), float(w[0]), threshold)


def factorize_gram(A, clamp_tol=CLAMP_TOL):
    """Return the Hermitian square root ``V`` of PSD ``A``, so ``A = V^H V``.

    Eigenvalues in ``[-clamp_tol * lambda_max, 0]`` are treated as zero; anything
    more negative raises :class:`DomainError`. The result is always n x n, so a
    rank-deficient ``A`` yields a singular factor (zero columns in its eigenbasis).
    """
    w, E = eigh(A)
    scale = max(float(np.max(np.abs(w))), SCALE_FLOOR)
    if w[-1] < -clamp_tol * scale:
        raise DomainError(
            f"matrix is not positive semidefinite: eigenvalue {w[-1]:.6g} "
            f"(largest magnitude {scale:.6g})"
        )
    root = np.sqrt(np.clip(w, 0.0, None))
    V = (E * root) @ E.conj().T
    return 0.5 * (V + V.conj().T)


def gram(V):
    """Gram matrix ``V^H V`` of the columns of ``V``."""
    V = np.asarray(V)
    A = V.conj().T @ V
    return 0.5 * (A + A.conj().T)


def reconstruction_error(A, V):
    """Relative Frobenius error of ``V^H V`` against ``A``."""
    A = np.asarray(A)
    return float(np.linalg.norm(gram(V) - A) / max(np.linalg.norm(A), SCALE_FLOOR))


def loewner_leq(A, B, tol=1e-9):
    """True iff ``A <= B`` in the Loewner order, i.e. ``B - A`` is PSD.

    The smallest eigenvalue of ``B - A`` may dip to ``-tol * scale``, where
    ``scale`` is the largest eigenvalue magnitude of ``A`` or ``B`` (floored at
    1e-14). ``tol=0`` gives a strict check.
    """
    A = as_hermitian(A)
    B = as_hermitian(B)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    scale = max(np.max(np.abs(eigvalsh(A))), np.max(np.abs(eigvalsh(B))), SCALE_FLOOR)
    return bool(eigvalsh(B - A)[-1] >= -tol * scale)


def random_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def hermitian_basis(r, count=None):
    """Orthonormal real basis (Frobenius inner product) of r x r Hermitian matrices.

    Returns an array of shape (count, r, r), by default all r*r elements: the
    r diagonal units, then for each j < k the symmetric and antisymmetric
    off-diagonal pairs scaled by 1/sqrt(2).
    """
    count = r * r if count is None else min(count, r * r)
    B = np.zeros((count, r, r), dtype=complex)
    c = 1.0 / np.sqrt(2.0)
    idx = 0
    for k in range(min(r, count)):
        B[idx, k, k] = 1.0
        idx += 1
    for j in range(r):
        for k in range(j + 1, r):
            if idx >= count:
                return B
            B[idx, j, k] = B[idx, k, j] = c
            if idx + 1 < count:
                B[idx + 1, j, k] = 1j * c
                B[idx + 1, k, j] = -1j * c
            idx += 2
    return B


def quadratic_coefficients(U, B):
    """Real matrix C with C[i, k] = u_i^H B_k u_i for columns u_i of ``U``."""
    return np.einsum("ai,kab,bi->ik", U.conj(), B, U).real
