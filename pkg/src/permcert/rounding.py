"""Gaussian rounding of a dual point and the certified sandwich on per(A).

Rounding draws z ~ CN(0, I_r) and maps it to y = sqrt(n) U z / ||U z|| on the
sphere ||y||^2 = n. For any such y,

    (n! / n^n) prod_i |<v_i, y>|^2 <= per(A),

so each draw is a checkable lower bound; the diagonal certificate from the
relaxation is the matching upper bound.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import L, approx_factor, log_factorial
from .errors import NumericError
from .hermitian import as_hermitian
from .permanent import estimate_from_logs
from .rank_reduction import ReductionTrace, reduce_rank
from .relaxation import SolverOptions, psd_factor, rel
from .rng import ROUNDING, complex_normal, make_rng
from .sphere import local_maximize_sphere

SPHERE_TOL = 1e-8


@dataclass(frozen=True)
class RoundedVector:
    """A point on the sphere ||y||^2 = n with its log objective."""

    y: np.ndarray
    objective_log: float


@dataclass(frozen=True)
class CertifiedBounds:
    log_lower: float
    log_upper: float
    witness: RoundedVector
    rank_r: int
    log_factor: float
    log_rel: float
    converged: bool
    validated: bool
    seed: int
    k_rounds: int
    reduction: ReductionTrace | None = field(default=None, repr=False)

    @property
    def n(self):
        return self.witness.y.size

    @property
    def a_priori_log_lower(self):
        """Guaranteed-in-expectation lower bound log((n!/n^n) e^{-n L_r} rel(A))."""
        return self.log_factor + self.log_rel

    @property
    def beats_a_priori(self):
        return self.log_lower >= self.a_priori_log_lower

    @property
    def loose(self):
        return not self.converged


def objective_product(V, x):
    """sum_i log |<v_i, x>|^2; ``-inf`` when x is orthogonal to some v_i."""
    inner = np.asarray(V).conj().T @ np.asarray(x)
    mags = np.abs(inner) ** 2
    if np.any(mags == 0):
        return -math.inf
    return float(np.sum(np.log(mags)))


def _objectives(V, Y):
    # rows of Y are points; returns sum_i log |<v_i, y>|^2 per row
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(Y @ V.conj()) ** 2), axis=1)


def _to_sphere(U, Z):
    n = U.shape[0]
    Y = Z @ U.T  # row j is (U z_j)^T
    norms = np.linalg.norm(Y, axis=1)
    if np.any(norms == 0):
        raise NumericError("U z = 0; the factor U is zero")
    return math.sqrt(n) * Y / norms[:, None]


def round_once(U, rng, V=None):
    """One Gaussian rounding draw y = sqrt(n) U z / ||U z||.

    The objective is filled in when the Gram factor ``V`` is given.
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    z = complex_normal(rng, (1, U.shape[1]))
    y = _to_sphere(U, z)[0]
    obj = objective_product(V, y) if V is not None else math.nan
    return RoundedVector(y, obj)


def best_of_k_rounding(U, V, k, seed):
    """Best of ``k`` rounding draws from the stream ``(seed, ROUNDING)``.

    Draw j is the j-th call of :func:`round_once` on that stream, so ``k = 1``
    reproduces a single draw. Ties go to the lowest index; draws with a zero
    factor (objective ``-inf``) can only win if every draw is ``-inf``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    V = np.asarray(V, dtype=complex)
    Z = complex_normal(make_rng(seed, ROUNDING), (k, U.shape[1]))
    Y = _to_sphere(U, Z)
    obj = _objectives(V, Y)
    j = int(np.argmax(obj))
    return RoundedVector(Y[j], float(obj[j]))


def expected_rounding_value(U, V, samples, seed):
    """Monte Carlo estimate of E prod_i |<v_i, y>|^2 over rounding draws."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    V = np.asarray(V, dtype=complex)
    rng = make_rng(seed, ROUNDING)
    blocks = []
    left = samples
    while left:
        m = min(left, 1 << 15)
        blocks.append(_objectives(V, _to_sphere(U, complex_normal(rng, (m, U.shape[1])))))
        left -= m
    return estimate_from_logs(blocks)


def lower_bound_from_vector(V, y):
    """log((n!/n^n) prod_i |<v_i, y>|^2), a lower bound on log per(V^H V).

    ``y`` is renormalized onto the sphere (with a warning) if it is off by
    more than 1e-8 relative, since the bound only holds there.
    """
    if isinstance(y, RoundedVector):
        y = y.y
    y = np.asarray(y, dtype=complex)
    n = y.size
    norm2 = float(np.vdot(y, y).real)
    if norm2 == 0:
        raise ValueError("y must be nonzero")
    if abs(norm2 - n) > SPHERE_TOL * n:
        warnings.warn(f"y is off the sphere (||y||^2 = {norm2:.6g}, n = {n}); renormalized", RuntimeWarning)
        y = y * math.sqrt(n / norm2)
    return log_factorial(n) - n * math.log(n) + objective_product(V, y)


def certify_sandwich(A, k_rounds=None, reduce=True, seed=0, options=None, refine=True, result=None):
    """Certified lower and upper bounds on log per(A).

    Pipeline: relaxation -> optional rank reduction of the dual point ->
    best-of-k rounding. The upper bound is the validated diagonal
    certificate; the lower bound comes from the best rounded witness. Both
    are valid even if the solver stopped early (then ``loose`` is set).
    With ``refine`` the best witness is pushed uphill by local ascent on the
    sphere, which can only raise the lower bound.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    k = k_rounds if k_rounds is not None else 64 * n
    if result is None:
        result = rel(A, options or SolverOptions())
    cert = result.certificate
    if result.solution is None:
        # zero diagonal: per(A) = 0 and both bounds collapse
        y = np.full(n, 1.0 + 0.0j)
        witness = RoundedVector(y, objective_product(result.V, y))
        return CertifiedBounds(
            -math.inf, -math.inf, witness, 1, approx_factor(n, 1).log_value,
            -math.inf, True, cert.validated, seed, k,
        )
    sol = result.solution
    U = sol.U
    trace = None
    if reduce:
        P_red, trace = reduce_rank(result.V, sol.P)
        if not trace.aborted:
            U = psd_factor(P_red)
    r = U.shape[1]
    witness = best_of_k_rounding(U, result.V, k, seed)
    if refine and math.isfinite(witness.objective_log):
        ascent = local_maximize_sphere(result.V, witness.y, max_iter=200 * n, seed=seed)
        if ascent.objective_log > witness.objective_log:
            witness = RoundedVector(ascent.x, ascent.objective_log)
    log_lower = lower_bound_from_vector(result.V, witness.y) if math.isfinite(witness.objective_log) else -math.inf
    return CertifiedBounds(
        log_lower=log_lower,
        log_upper=cert.log_upper,
        witness=witness,
        rank_r=r,
        log_factor=approx_factor(n, r).log_value,
        log_rel=result.log_rel,
        converged=sol.converged,
        validated=cert.validated,
        seed=seed,
        k_rounds=k,
        reduction=trace,
    )


def rank_one_rounding_value(U, V):
    """Deterministic rounding objective when U has a single column."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    if U.shape[1] != 1:
        raise ValueError("rank_one_rounding_value needs a single-column U")
    n = U.shape[0]
    u = U[:, 0]
    return objective_product(V, math.sqrt(n) * u / np.linalg.norm(u))


def expected_value_bound(n, r, log_nu):
    """log of e^{-n L_r} nu*, the expectation guarantee for rank-r rounding."""
    return log_nu - n * L(r)
