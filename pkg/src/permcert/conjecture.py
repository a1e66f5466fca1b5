"""Numerical checks of the sphere-maximum sandwich and of Pate's inequality.

r(A) = max_{||x||^2 = n} prod_i |<v_i, x>|^2 is estimated from below by
multi-start local ascent. The lower direction (n!/n^n) r(A) <= per(A) is a
theorem, so a failure there points at a bug. The upper direction
per(A) <= r(A) is open; a local search only under-estimates r(A), so an
apparent failure is reported as "unresolved" and never as a disproof.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import log_factorial
from .errors import SizeError
from .hermitian import as_hermitian
from .permanent import EXACT_CAP, permanent_exact
from .relaxation import rel
from .rng import LOCAL_SEARCH, complex_normal, make_rng
from .rounding import _to_sphere, certify_sandwich
from .sphere import local_maximize_sphere

REL_SLACK = 1e-8


@dataclass(frozen=True)
class ConjectureReport:
    instance_id: str
    log_r_lower: float
    log_per: float
    log_nu: float  # certified upper bound on log nu*
    lower_holds: bool
    upper_consistent: bool
    counterexample_flag: bool
    status: str
    starts: int = 0
    seed: int = 0


@dataclass(frozen=True)
class PateResult:
    lhs_log: float
    rhs_log: float
    holds: bool
    n: int
    k: int


def _slack_leq(a, b, rel=REL_SLACK):
    # a <= b * (1 + rel) in log space; -inf on the left always passes
    if a == -math.inf:
        return True
    return a <= b + math.log1p(rel)


def check_vdw_conjecture(A, starts=20, seed=0, instance_id="", workers=1, k_rounds=None):
    """Multi-start search for r(A) and the two sandwich checks against per(A).

    Start 0 is the certified best-of-k witness; the others are independent
    rounding draws of the relaxation optimum on the substreams
    ``(seed, LOCAL_SEARCH, j)``. The best local maximum wins, ties going to
    the lowest start index.
    """
    A = as_hermitian(A)
    n = A.shape[0]
    if n > EXACT_CAP:
        raise SizeError(f"n = {n} exceeds the exact permanent cap {EXACT_CAP}")
    log_per = permanent_exact(A, log=True)
    result = rel(A)
    bounds = certify_sandwich(A, k_rounds=k_rounds, seed=seed, result=result)
    # the solver value sits up to the gap tolerance below nu*; the dual bound
    # is a certified upper bound on nu* and hence on r(A)
    log_nu = result.solution.log_mu_bound if result.solution is not None else -math.inf
    if not math.isfinite(bounds.log_upper):
        # a zero diagonal entry: every quantity is zero
        return ConjectureReport(instance_id, -math.inf, log_per, -math.inf, True, True, False,
                                "consistent", 0, seed)
    V, U = result.V, result.solution.U
    x_starts = [bounds.witness.y]
    for j in range(1, starts):
        z = complex_normal(make_rng(seed, LOCAL_SEARCH, j), (1, U.shape[1]))
        x_starts.append(_to_sphere(U, z)[0])

    def run(j):
        return local_maximize_sphere(V, x_starts[j], seed=seed * 1000003 + j)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            found = list(pool.map(run, range(len(x_starts))))
    else:
        found = [run(j) for j in range(len(x_starts))]
    log_r = max(f.objective_log for f in found)

    log_c = log_factorial(n) - n * math.log(n)
    lower_holds = _slack_leq(log_c + log_r, log_per)
    upper_consistent = _slack_leq(log_per, log_nu)
    # only a per exceeding the best found r is suspicious, and even then
    # r(A) may simply lie above every local maximum found
    counterexample_flag = not _slack_leq(log_per, log_r)
    status = "unresolved" if counterexample_flag or not upper_consistent else "consistent"
    return ConjectureReport(instance_id, log_r, log_per, log_nu, lower_holds, upper_consistent,
                            counterexample_flag, status, len(x_starts), seed)


def check_pate(A, k):
    """Compare log per(A kron J_k) with k log per(A) + n log k!."""
    A = as_hermitian(A)
    n = A.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n * k > EXACT_CAP:
        raise SizeError(f"n * k = {n * k} exceeds the exact permanent cap {EXACT_CAP}")
    lhs = permanent_exact(np.kron(A, np.ones((k, k))), log=True)
    log_per = permanent_exact(A, log=True)
    rhs = k * log_per + n * log_factorial(k) if log_per > -math.inf else -math.inf
    holds = rhs == -math.inf or lhs >= rhs - 1e-9 * max(1.0, abs(rhs))
    return PateResult(lhs, rhs, bool(holds), n, k)
