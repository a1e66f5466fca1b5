"""Exact and Monte Carlo permanents.

``permanent_exact`` is Ryser's inclusion-exclusion formula. The column
subsets are split into a high part walked in Gray-code order (one column
added or removed per step) and a low part enumerated as a precomputed block of
subset sums, so each Gray-code step updates all 2**low row-sum vectors with a
single vectorized add.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError, SizeError
from .rng import GAUSSIAN_MC, complex_normal, make_rng

logger = logging.getLogger(__name__)

EXACT_CAP = 20
_LOW_BITS = 10
MC_BLOCK = 1 << 15


def _subset_sums(cols):
    """Row sums for every subset of ``cols`` (shape n x k), ordered by bitmask."""
    n, k = cols.shape
    out = np.zeros((1 << k, n), dtype=cols.dtype)
    for j in range(k):
        width = 1 << j
        out[width:2 * width] = out[:width] + cols[:, j]
    return out


def _popcount_parity(k):
    masks = np.arange(1 << k)
    parity = np.zeros(1 << k, dtype=np.int64)
    for j in range(k):
        parity ^= (masks >> j) & 1
    return np.where(parity == 1, -1.0, 1.0)


def _ryser(A):
    n = A.shape[0]
    low = min(n, _LOW_BITS)
    high = n - low
    low_sums = _subset_sums(A[:, :low])  # (2^low, n)
    low_sign = _popcount_parity(low)
    base = np.zeros(n, dtype=A.dtype)
    high_cols = A[:, low:]
    total = 0.0 + 0.0j
    high_parity = 1.0
    gray = 0
    for step in range(1 << high):
        if step:
            bit = (step & -step).bit_length() - 1
            if gray >> bit & 1:
                base = base - high_cols[:, bit]
            else:
                base = base + high_cols[:, bit]
            gray ^= 1 << bit
            high_parity = -high_parity
        prods = np.prod(low_sums + base, axis=1)
        total += high_parity * np.dot(low_sign, prods)
    # Ryser: per = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij
    return total if n % 2 == 0 else -total


def _check_entries(A, cap):
    try:
        A = np.asarray(A, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries are not numeric: {exc}") from exc
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"permanent needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ParseError("matrix has non-finite entries")
    n = A.shape[0]
    if n > cap:
        raise SizeError(f"exact permanent is capped at n <= {cap}, got n = {n}")
    return A


def permanent_complex(A, cap=EXACT_CAP):
    """Exact permanent of a square complex matrix (complex result)."""
    A = _check_entries(A, cap)
    n = A.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    # row scaling keeps the running products in range
    scale = np.max(np.abs(A), axis=1)
    if np.any(scale == 0):
        return 0.0 + 0.0j
    value = _ryser(A / scale[:, None])
    return complex(value * np.exp(np.sum(np.log(scale))))


def permanent_exact(A, cap=EXACT_CAP, log=False):
    """Exact permanent via Ryser, O(2^n n).

    Hermitian PSD inputs have a real, non-negative permanent; the real part is
    returned and an imaginary residue above 1e-9 relative is logged. With
    ``log=True`` the natural log of that real part is returned (``-inf`` for 0),
    which avoids overflow for large entries.
    """
    A = _check_entries(A, cap)
    n = A.shape[0]
    if n == 0:
        return 0.0 if log else 1.0
    scale = np.max(np.abs(A), axis=1)
    if np.any(scale == 0):
        return -math.inf if log else 0.0
    value = _ryser(A / scale[:, None])
    if abs(value.imag) > 1e-9 * abs(value):
        logger.warning(
            "permanent has imaginary part %.3g (|per| = %.3g); returning real part",
            value.imag, abs(value),
        )
    log_scale = float(np.sum(np.log(scale)))
    if log:
        return math.log(value.real) + log_scale if value.real > 0 else -math.inf
    return float(value.real * math.exp(log_scale))


def permanent_bruteforce(A):
    """Direct sum over all permutations; test oracle for tiny n only."""
    from itertools import permutations

    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    rows = np.arange(n)
    return complex(sum(np.prod(A[rows, list(p)]) for p in permutations(range(n))))


def permanent_rank_one(v):
    """per(v v^H) = n! * prod |v_i|^2, evaluated in log space."""
    v = np.asarray(v, dtype=complex).ravel()
    n = v.size
    mags = np.abs(v) ** 2
    if np.any(mags == 0):
        return 0.0
    return math.exp(math.lgamma(n + 1) + float(np.sum(np.log(mags))))


def sphere_correction(n, d):
    """log((n+d-1)! / (n^n (n-1)!)); at d = n this is the Gaussian-to-sphere factor."""
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    return math.lgamma(n + d) - n * math.log(n) - math.lgamma(n)


@dataclass(frozen=True)
class PermanentEstimate:
    """Monte Carlo mean with its standard error.

    ``mean`` and ``std_error`` may overflow for large problems; ``log_mean`` and
    ``log_std_error`` are always finite when the samples are.
    """

    mean: float
    std_error: float
    samples: int
    log_domain: bool
    log_mean: float
    log_std_error: float

    def within(self, value, k=3.0):
        return abs(self.mean - value) <= k * self.std_error


@dataclass(frozen=True)
class _Moments:
    # count, and mean / M2 of exp(logs - shift)
    count: int
    shift: float
    mean: float
    m2: float


def _block_moments(logs):
    finite = logs[np.isfinite(logs)]
    shift = float(np.max(finite)) if finite.size else 0.0
    x = np.exp(logs - shift)
    mean = float(np.mean(x))
    return _Moments(logs.size, shift, mean, float(np.sum((x - mean) ** 2)))


def _pool(a, b):
    # Chan/Welford pairwise merge, after rescaling both blocks to a common shift
    shift = max(a.shift, b.shift)
    sa = math.exp(a.shift - shift)
    sb = math.exp(b.shift - shift)
    ma, mb = a.mean * sa, b.mean * sb
    count = a.count + b.count
    delta = mb - ma
    mean = ma + delta * b.count / count
    m2 = a.m2 * sa * sa + b.m2 * sb * sb + delta * delta * a.count * b.count / count
    return _Moments(count, shift, mean, m2)


def estimate_from_logs(blocks):
    """Pool per-block log-samples (in order) into a :class:`PermanentEstimate`."""
    moments = [_block_moments(np.asarray(b, dtype=float)) for b in blocks]
    total = moments[0]
    for m in moments[1:]:
        total = _pool(total, m)
    N = total.count
    var = total.m2 / (N - 1) if N > 1 else 0.0
    se = math.sqrt(var / N)
    log_mean = math.log(total.mean) + total.shift if total.mean > 0 else -math.inf
    log_se = math.log(se) + total.shift if se > 0 else -math.inf
    with np.errstate(over="ignore"):
        mean = float(np.exp(log_mean))
        std_error = float(np.exp(log_se))
    return PermanentEstimate(mean, std_error, N, True, log_mean, log_se)


def gaussian_log_integrand(V, x):
    """log prod_i |<v_i, x>|^2 for each row of ``x`` (shape samples x n)."""
    inner = x @ V.conj()  # <v_i, x> = v_i^H x for every sample
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(inner) ** 2), axis=1)


def permanent_mc_gaussian(V, samples, seed, workers=1):
    """Unbiased estimate of per(V^H V) = E prod |<v_i, x>|^2, x ~ CN(0, I).

    Samples are split into fixed blocks; block b draws from the substream
    ``(seed, GAUSSIAN_MC, b)``, so the estimate does not depend on ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    V = np.asarray(V, dtype=complex)
    n = V.shape[0]
    sizes = [MC_BLOCK] * (samples // MC_BLOCK)
    if samples % MC_BLOCK:
        sizes.append(samples % MC_BLOCK)

    def block(b):
        rng = make_rng(seed, GAUSSIAN_MC, b)
        return gaussian_log_integrand(V, complex_normal(rng, (sizes[b], n)))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(block, range(len(sizes))))
    else:
        blocks = [block(b) for b in range(len(sizes))]
    return estimate_from_logs(blocks)
