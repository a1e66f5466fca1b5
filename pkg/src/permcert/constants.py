"""Harmonic numbers, L_r, integer digamma values and the approximation factor."""

import math
from dataclasses import dataclass

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286060651209008240243

EXACT_HARMONIC_MAX = 10**6


def harmonic(r):
    """H_r = 1 + 1/2 + ... + 1/r, with H_0 = 0.

    Kahan-compensated summation up to r = 10**6; beyond that the asymptotic
    expansion (error far below double precision) is used.
    """
    if r < 0:
        raise DomainError(f"harmonic number needs r >= 0, got {r}")
    if r > EXACT_HARMONIC_MAX:
        inv = 1.0 / r
        inv2 = inv * inv
        return math.log(r) + EULER_GAMMA + 0.5 * inv - inv2 / 12 + inv2 * inv2 / 120
    total = 0.0
    comp = 0.0
    for k in range(1, r + 1):
        y = 1.0 / k - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def L(r):
    """L_r = H_{r-1} - log r; increases from L_1 = 0 toward Euler's gamma."""
    if r < 1:
        raise DomainError(f"L_r needs r >= 1, got {r}")
    if r == 1:
        return 0.0
    return harmonic(r - 1) - math.log(r)


def digamma_integer(r):
    """psi(r) = H_{r-1} - gamma for positive integers."""
    if r < 1:
        raise DomainError(f"digamma_integer needs r >= 1, got {r}")
    return harmonic(r - 1) - EULER_GAMMA


def log_factorial(n):
    return math.lgamma(n + 1)


@dataclass(frozen=True)
class ApproxFactor:
    """log of (n!/n^n) * exp(-n * L_r)."""

    n: int
    r: int
    log_value: float

    @property
    def value(self):
        return math.exp(self.log_value)


def approx_factor(n, r):
    if n < 1:
        raise DomainError(f"approx_factor needs n >= 1, got {n}")
    if not 1 <= r <= n:
        raise DomainError(f"rank r must satisfy 1 <= r <= n, got r={r}, n={n}")
    return ApproxFactor(n, r, log_factorial(n) - n * math.log(n) - n * L(r))


@dataclass(frozen=True)
class LrBoundCheck:
    r: int
    gamma_minus_L: float
    lower: float
    upper: float
    holds: bool


def _bracket(r, gamma_minus_L):
    lower = 1.0 / (2 * r)
    upper = (r + 2) / (2.0 * r * (r + 1))
    return LrBoundCheck(r, gamma_minus_L, lower, upper, lower < gamma_minus_L < upper)


def check_Lr_bounds(r):
    """Evaluate 1/(2r) < gamma - L_r < (r+2)/(2r(r+1))."""
    if r < 1:
        raise DomainError(f"r must be >= 1, got {r}")
    # (gamma + log r) - H_{r-1} keeps the subtraction of the two large terms last
    return _bracket(r, (EULER_GAMMA + math.log(r)) - harmonic(r - 1))


def sweep_Lr_bounds(r_max):
    """Check the bracket for every r in [1, r_max] with one running sum.

    Returns the list of r for which the strict bracket fails (empty when it
    holds throughout).
    """
    failures = []
    total = 0.0  # H_{r-1}, Kahan-compensated
    comp = 0.0
    log = math.log
    for r in range(1, r_max + 1):
        g = (EULER_GAMMA + log(r)) - total
        if not (1.0 / (2 * r) < g < (r + 2) / (2.0 * r * (r + 1))):
            failures.append(r)
        y = 1.0 / r - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return failures
