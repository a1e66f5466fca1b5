"""Local ascent for prod_i |<v_i, x>|^2 on the sphere ||x||^2 = n.

Works with f(x) = sum_i log |<v_i, x>|^2. The Euclidean gradient is
2 sum_i v_i <v_i, x> / |<v_i, x>|^2; it is projected to the tangent space,
a Barzilai-Borwein trial step is backtracked until an Armijo increase holds,
and the result is pulled back onto the sphere by rescaling.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import LOCAL_SEARCH, make_rng

TINY = 1e-280


@dataclass(frozen=True)
class SphereSearchResult:
    x: np.ndarray
    objective_log: float
    grad_norm: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)


def _gauge(x):
    # global phase is a symmetry of f; fix it by making the first entry real positive
    mags = np.abs(x)
    k = int(np.flatnonzero(mags > 1e-12 * mags.max())[0])
    return x * (np.conj(x[k]) / mags[k])


def _retract(x, n):
    return _gauge(x * math.sqrt(n) / np.linalg.norm(x))


def _evaluate(V, x):
    a = V.conj().T @ x
    m = np.abs(a) ** 2
    f = float(np.sum(np.log(m))) if np.all(m > 0) else -math.inf
    g = 2.0 * V @ (a / np.maximum(m, TINY))
    n = x.size
    g_tan = g - (np.vdot(x, g).real / n) * x
    return f, g_tan, bool(np.min(m) < TINY)


def _perturb(x, rng, scale=1e-6):
    n = x.size
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z -= (np.vdot(x, z).real / n) * x
    return _retract(x + scale * math.sqrt(n) * z / np.linalg.norm(z), n)


def local_maximize_sphere(V, x0, max_iter=5000, step_tol=1e-8, seed=0):
    """Projected gradient ascent from ``x0``; the objective never decreases.

    Stops when the tangent gradient norm is at most ``step_tol``. Points where
    some |<v_i, x>|^2 < 1e-280 get a small seeded random tangent kick.
    """
    V = np.asarray(V, dtype=complex)
    x = np.asarray(x0, dtype=complex)
    n = x.size
    rng = make_rng(seed, LOCAL_SEARCH)
    x = _retract(x, n)
    f, g, singular = _evaluate(V, x)
    while singular or not math.isfinite(f):
        x = _perturb(x, rng)
        f, g, singular = _evaluate(V, x)
    history = [f]
    eta = 1.0 / max(np.linalg.norm(g), 1.0)
    it = 0
    gnorm = float(np.linalg.norm(g))
    while gnorm > step_tol and it < max_iter:
        it += 1
        step = eta
        accepted = False
        while step > 1e-20:
            x_new = _retract(x + step * g, n)
            f_new, g_new, singular = _evaluate(V, x_new)
            if math.isfinite(f_new) and f_new >= f + 1e-4 * step * gnorm**2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # no ascent possible at working precision
        if singular:
            x_new = _perturb(x_new, rng)
            f_kick, g_kick, _ = _evaluate(V, x_new)
            if f_kick >= f:
                f_new, g_new = f_kick, g_kick
        s = x_new - x
        y = g_new - g
        curv = -float(np.vdot(s, y).real)
        eta = float(np.vdot(s, s).real) / curv if curv > 0 else 2.0 * step
        eta = min(max(eta, 1e-12), 1e6)
        x, f, g = x_new, f_new, g_new
        gnorm = float(np.linalg.norm(g))
        history.append(f)
    return SphereSearchResult(x, f, gnorm, it, gnorm <= step_tol, history)
