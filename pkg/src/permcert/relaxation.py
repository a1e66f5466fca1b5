"""The product-of-quadratic-forms relaxation and its diagonal certificate.

The dual program is

    maximize  sum_i log(v_i^H P v_i)   subject to  P >= 0, Tr P = n,

whose optimum is log rel(A). Any feasible P also yields an explicit diagonal
D >= A (see :func:`extract_diagonal_certificate`), so every iterate carries a
rigorous upper bound and a computable duality gap.

The solver starts with conditional-gradient (Frank-Wolfe) steps from P = I
with an exact line search. Conditional gradient converges sublinearly, so
``method="auto"`` hands over to a path-following Newton method on the convex
form of the primal

    minimize  sum_i s_i   subject to  sum_i exp(-s_i) v_i v_i^H <= I,

(s_i = log D_ii), then polishes on the face spanned by the support of the
resulting P, where the problem is smooth and small.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, NumericError
from .hermitian import (
    as_hermitian,
    factorize_gram,
    gram,
    hermitian_basis,
    loewner_leq,
    quadratic_coefficients,
    reconstruction_error,
    RECONSTRUCT_TOL,
)

INFLATION = 1e-8
FACTOR_TOL = 1e-12
_MAX_POLISH_DIM = 400
_T_MAX = 1e12
_PATH_FACTOR = 20.0


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`solve_dual`.

    ``max_iter`` defaults to 50 n^2. ``method`` is ``"auto"`` (conditional
    gradient, then Newton path-following and face polish when needed) or
    ``"frank-wolfe"`` (conditional gradient only). ``cg_iter`` caps the
    conditional-gradient phase of ``"auto"`` (default 25 steps).
    """

    max_iter: int | None = None
    gap_tol: float = 1e-7
    min_form_floor: float = 1e-300
    method: str = "auto"
    cg_iter: int | None = None
    inflation: float = INFLATION


@dataclass(frozen=True)
class DiagonalCertificate:
    """Diagonal D = Diag(d) with D >= A, built from a feasible dual point.

    ``d[i] = lam / alpha[i]`` with prod(alpha) = 1, so prod(d) = lam^n. The
    Loewner check is done on ``d * (1 + inflation)``, and that inflated
    product is the reported upper bound ``log_upper``.
    """

    d: np.ndarray
    lam: float
    alpha: np.ndarray
    validated: bool
    inflation: float
    log_mu_bound: float

    @property
    def log_upper(self):
        if not np.all(self.d > 0):
            return -math.inf
        return float(np.sum(np.log(self.d))) + self.d.size * math.log1p(self.inflation)


@dataclass(frozen=True)
class IterateRecord:
    phase: str
    log_nu: float
    log_mu: float


@dataclass(frozen=True)
class RelaxationSolution:
    """A feasible dual point with its objective and certified gap."""

    P: np.ndarray
    U: np.ndarray
    log_nu: float
    log_mu_bound: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def log_gap(self):
        return self.log_mu_bound - self.log_nu

    @property
    def gap_ratio(self):
        return math.exp(self.log_gap)

    @property
    def rank(self):
        return self.U.shape[1]


@dataclass(frozen=True)
class RelResult:
    log_rel: float
    solution: RelaxationSolution | None
    certificate: DiagonalCertificate
    V: np.ndarray

    @property
    def n(self):
        return self.V.shape[0]


def quadratic_forms(V, P):
    """q_i = v_i^H P v_i for every column of ``V``."""
    return np.einsum("ji,jk,ki->i", V.conj(), P, V).real


def gradient_matrix(V, q):
    """sum_i v_i v_i^H / q_i, the gradient of sum log q_i at P."""
    G = (V / q) @ V.conj().T
    return 0.5 * (G + G.conj().T)


def psd_factor(P, tol=FACTOR_TOL):
    """U with P ~= U U^H, keeping eigenvalues above ``tol * lambda_max``."""
    w, E = np.linalg.eigh(0.5 * (P + P.conj().T))
    keep = w > tol * max(w[-1], 0.0)
    keep[-1] = True
    U = E[:, keep] * np.sqrt(np.clip(w[keep], 0.0, None))
    return U[:, ::-1]


def line_search(q, s, tol=1e-15, max_steps=100):
    """argmax over t in [0, 1] of sum_i log((1 - t) q_i + t s_i).

    The objective is concave, so its derivative is decreasing. Newton steps
    on the derivative are kept inside a shrinking bisection bracket.
    """
    d = s - q

    def slope(t):
        return float(np.sum(d / (q + t * d)))

    if slope(0.0) <= 0:
        return 0.0
    if np.all(s > 0) and slope(1.0) >= 0:
        return 1.0
    lo, hi = 0.0, 1.0
    t = 0.5
    for _ in range(max_steps):
        f = q + t * d
        if np.any(f <= 0):
            hi = t
            t = 0.5 * (lo + hi)
            continue
        r = d / f
        g = float(np.sum(r))
        h = -float(np.sum(r * r))
        if g > 0:
            lo = t
        else:
            hi = t
        t_new = t - g / h if h < 0 else 0.5 * (lo + hi)
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= tol * max(1.0, t) or hi - lo <= tol:
            return t_new
        t = t_new
    return t


def extract_diagonal_certificate(V, P, A=None, inflation=INFLATION):
    """Build D = Diag(d) >= A from any feasible dual point P.

    alpha_i = c / (v_i^H P v_i) with c the geometric mean of the forms, so
    prod(alpha) = 1; lam = lambda_max(V Diag(alpha) V^H); d = lam / alpha.
    Then V Diag(alpha) V^H <= lam I, which is equivalent to Diag(d) >= V^H V.
    The returned ``log_mu_bound = n log lam`` upper-bounds the dual optimum.
    """
    V = np.asarray(V, dtype=complex)
    n = V.shape[0]
    q = quadratic_forms(V, P)
    if np.any(q <= 0):
        raise DomainError("certificate needs v_i^H P v_i > 0 for every i")
    log_q = np.log(q)
    log_c = float(np.mean(log_q))
    alpha = np.exp(log_c - log_q)
    M = (V * alpha) @ V.conj().T
    lam = float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1])
    d = lam / alpha
    if A is None:
        A = gram(V)
    # D^{-1/2} A D^{-1/2} <= (1 + inflation) I  <=>  Diag(d (1 + inflation)) >= A
    scaled = A / np.sqrt(np.outer(d, d))
    validated = loewner_leq(scaled, (1.0 + inflation) * np.eye(n), tol=0.0)
    return DiagonalCertificate(d, lam, alpha, validated, inflation, n * math.log(lam))


def _certify_point(V, P):
    q = quadratic_forms(V, P)
    G = gradient_matrix(V, q)
    lam_max = float(np.linalg.eigvalsh(G)[-1])
    log_nu = float(np.sum(np.log(q)))
    return q, G, log_nu, log_nu + V.shape[0] * math.log(lam_max)


class _Tracker:
    """Keeps the best feasible point seen and the per-iterate history."""

    def __init__(self, V, gap_tol):
        self.V = V
        self.log_tol = math.log1p(gap_tol)
        self.history = []
        self.best = None  # (log_nu, log_mu, P, phase)

    def offer(self, phase, P):
        q, G, log_nu, log_mu = _certify_point(self.V, P)
        self.history.append(IterateRecord(phase, log_nu, log_mu))
        if self.best is None or log_nu > self.best[0]:
            self.best = (log_nu, log_mu, P, phase)
        return q, G, log_nu, log_mu

    def done(self):
        return self.best is not None and self.best[1] - self.best[0] <= self.log_tol


def _conditional_gradient(V, P, steps, floor, tracker):
    n = V.shape[0]
    it = 0
    while True:
        q = quadratic_forms(V, P)
        if np.min(q) < floor:
            raise NumericError("quadratic form fell below min_form_floor", residual=float(np.min(q)))
        _, G, _, _ = tracker.offer("cg", P)
        if tracker.done() or it >= steps:
            return P, it, False
        w, W = np.linalg.eigh(G)
        top = W[:, -1]
        s = n * np.abs(V.conj().T @ top) ** 2
        t = line_search(q, s)
        if t <= 0.0:
            return P, it, True
        P = (1.0 - t) * P + t * n * np.outer(top, top.conj())
        P = 0.5 * (P + P.conj().T)
        it += 1


def _barrier_eval(V, s):
    with np.errstate(over="ignore", invalid="ignore"):
        w = np.exp(-s)
        if not np.all(np.isfinite(w)):
            return None
        S = np.eye(V.shape[0]) - (V * w) @ V.conj().T
    if not np.all(np.isfinite(S)):
        return None
    e, E = np.linalg.eigh(0.5 * (S + S.conj().T))
    if e[0] <= 0:
        return None
    return w, e, E


def _face_polish(V, P, support_tol, max_steps=50):
    """Maximize sum log q_i over trace-n PSD matrices living on range(P)'s support."""
    n = V.shape[0]
    ev, E = np.linalg.eigh(0.5 * (P + P.conj().T))
    keep = ev > support_tol * ev[-1]
    r = int(np.sum(keep))
    if r * r > _MAX_POLISH_DIM:
        return None, 0
    Er = E[:, keep]
    B = hermitian_basis(r)
    C = quadratic_coefficients(Er.conj().T @ V, B)
    a = np.einsum("kaa->k", B).real
    Q0 = np.diag(ev[keep] * (n / np.sum(ev[keep]))).astype(complex)
    x = np.einsum("kab,ab->k", B.conj(), Q0).real
    m = x.size
    steps = 0
    for steps in range(1, max_steps + 1):
        q = C @ x
        if np.any(q <= 0):
            return None, steps
        g = C.T @ (1.0 / q)
        H = -(C.T * (1.0 / q**2)) @ C
        K = np.zeros((m + 1, m + 1))
        K[:m, :m] = H
        K[:m, m] = a
        K[m, :m] = a
        dx = np.linalg.lstsq(K, np.concatenate([-g, [0.0]]), rcond=None)[0][:m]
        dec = float(g @ dx)
        if dec <= 1e-15:
            break
        f0 = float(np.sum(np.log(q)))
        step = 1.0
        while step > 1e-12:
            xn = x + step * dx
            qn = C @ xn
            if np.all(qn > 0):
                Qn = np.einsum("k,kab->ab", xn, B)
                if np.linalg.eigvalsh(Qn)[0] >= 0 and np.sum(np.log(qn)) >= f0 + 0.25 * step * dec:
                    break
            step *= 0.5
        else:
            break
        x = xn
    Q = np.einsum("k,kab->ab", x, B)
    P_face = Er @ Q @ Er.conj().T
    return 0.5 * (P_face + P_face.conj().T), steps


def _support_tol(log_gap):
    # eigenvalues of P off the optimal face shrink roughly like the gap
    return min(1e-2, max(math.sqrt(max(log_gap, 0.0)), 1e-9))


def _cleanup(V, tracker):
    """Re-polish the best point on its numerical support.

    Accepted only if the certified gap stays within tolerance and the
    objective does not drop, so the final P has a well-defined rank.
    """
    log_nu, log_mu, P_best, phase = tracker.best
    if phase == "polish":
        return 0
    polished, steps = _face_polish(V, P_best, _support_tol(log_mu - log_nu))
    if polished is None or np.min(quadratic_forms(V, polished)) <= 0:
        return steps
    _, _, lnu, lmu = _certify_point(V, polished)
    if lmu - lnu <= tracker.log_tol and lnu >= log_nu - 1e-12 * max(1.0, abs(log_nu)):
        tracker.history.append(IterateRecord("polish", lnu, lmu))
        tracker.best = (lnu, lmu, polished, "polish")
    return steps


def _path_following(V, P, budget, tracker):
    """Newton path-following on the primal barrier, seeded from dual point P."""
    n = V.shape[0]
    q = quadratic_forms(V, P)
    lam = float(np.linalg.eigvalsh(gradient_matrix(V, q))[-1])
    s = np.log(q * lam * 1.5)  # sum exp(-s_i) v_i v_i^H = G / (1.5 lam) < I
    t = None
    used = 0
    while used < budget:
        for _ in range(50):
            state = _barrier_eval(V, s)
            if state is None:
                raise NumericError("path-following lost strict feasibility")
            w, e, E = state
            X = (E / np.sqrt(e)).conj().T @ V
            K = X.conj().T @ X
            b = K.diagonal().real
            if t is None:
                t = float(np.mean(w * b))
            g = t - w * b
            H = np.diag(w * b) + np.outer(w, w) * np.abs(K) ** 2
            try:
                dx = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                dx = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = float(-g @ dx)
            used += 1
            if dec <= 2e-12 or used >= budget:
                break
            phi = t * s.sum() - np.sum(np.log(e))
            step = 1.0
            while step > 1e-14:
                trial = _barrier_eval(V, s + step * dx)
                if trial is not None:
                    if t * (s + step * dx).sum() - np.sum(np.log(trial[1])) <= phi - 0.25 * step * dec:
                        break
                step *= 0.5
            else:
                break
            s = s + step * dx
        R = (E / e) @ E.conj().T
        P_path = n * R / np.trace(R).real
        _, _, log_nu, log_mu = tracker.offer("path", P_path)
        gap = log_mu - log_nu
        if gap <= 1e-3:
            polished, steps = _face_polish(V, P_path, _support_tol(gap))
            used += steps
            if polished is not None and np.min(quadratic_forms(V, polished)) > 0:
                tracker.offer("polish", polished)
        if tracker.done() or t > _T_MAX:
            break
        t *= _PATH_FACTOR
    return used


def solve_dual(V, options=None):
    """Maximize sum_i log(v_i^H P v_i) over {P >= 0, Tr P = n}.

    Returns the best iterate found with its certified gap. ``converged`` is
    False when the gap target was not met within ``max_iter``; the point and
    bounds are still valid.
    """
    opts = options or SolverOptions()
    V = np.asarray(V, dtype=complex)
    n = V.shape[0]
    if np.any(np.sum(np.abs(V) ** 2, axis=0) <= 0):
        raise DomainError("solve_dual needs every column v_i to be nonzero")
    max_iter = opts.max_iter if opts.max_iter is not None else 50 * n * n
    if opts.method == "frank-wolfe":
        cg_steps = max_iter
    elif opts.method == "auto":
        cg_steps = min(max_iter, opts.cg_iter if opts.cg_iter is not None else 25)
    else:
        raise ValueError(f"unknown method {opts.method!r}")

    tracker = _Tracker(V, opts.gap_tol)
    P, used, _ = _conditional_gradient(V, np.eye(n, dtype=complex), cg_steps, opts.min_form_floor, tracker)
    if opts.method == "auto":
        if not tracker.done() and used < max_iter:
            used += _path_following(V, P, max_iter - used, tracker)
        if tracker.done():
            used += _cleanup(V, tracker)

    log_nu, log_mu, P, _ = tracker.best
    return RelaxationSolution(
        P=P,
        U=psd_factor(P),
        log_nu=log_nu,
        log_mu_bound=log_mu,
        iterations=used,
        converged=log_mu - log_nu <= tracker.log_tol,
        history=tracker.history,
    )


def _zero_diagonal_certificate(A, zero):
    n = A.shape[0]
    lam = float(np.linalg.eigvalsh(A)[-1])
    d = np.where(zero, 0.0, lam)
    alpha = np.where(zero, np.inf, 1.0)
    validated = loewner_leq(A, np.diag(d) * (1.0 + INFLATION), tol=0.0)
    return DiagonalCertificate(d, lam, alpha, validated, INFLATION, -math.inf)


def rel(A, options=None, factor=None):
    """log rel(A) together with the dual point and its diagonal certificate.

    ``factor`` may supply any V with V^H V = A (default: the Hermitian square
    root). A zero diagonal entry forces a zero row, so rel(A) = per(A) = 0 and
    the certificate puts D_ii = 0 there and lambda_max(A) elsewhere.
    """
    A = as_hermitian(A)
    if factor is None:
        V = factorize_gram(A)
    else:
        V = np.asarray(factor, dtype=complex)
        if V.shape != A.shape or reconstruction_error(A, V) > RECONSTRUCT_TOL:
            raise DomainError("supplied factor does not satisfy V^H V = A")
        factorize_gram(A)  # PSD check
    zero = A.diagonal().real <= 0
    if np.any(zero):
        return RelResult(-math.inf, None, _zero_diagonal_certificate(A, zero), V)
    opts = options or SolverOptions()
    solution = solve_dual(V, opts)
    certificate = extract_diagonal_certificate(V, solution.P, A=A, inflation=opts.inflation)
    if not math.isclose(certificate.log_mu_bound, solution.log_mu_bound, rel_tol=1e-9, abs_tol=1e-9):
        solution = replace(solution, log_mu_bound=min(solution.log_mu_bound, certificate.log_mu_bound))
    return RelResult(solution.log_nu, solution, certificate, V)
