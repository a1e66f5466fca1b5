"""Seeded, counter-based random streams.

Every stochastic routine draws from ``make_rng(seed, *keys)``. The generator
is Philox (a counter-based bit generator) keyed through ``SeedSequence``, so a
given ``(seed, keys)`` tuple yields the same stream on every platform and for
any worker layout.
"""

import numpy as np

# Stream tags; distinct tags keep the uses of one user seed independent.
INSTANCE = 1
ROUNDING = 2
GAUSSIAN_MC = 3
LOCAL_SEARCH = 4
EXPERIMENT = 5


def make_rng(seed, *keys):
    """Return a Philox generator for the substream ``(seed, *keys)``."""
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValueError("seeds and stream keys must be non-negative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def complex_normal(rng, size):
    """Draw circularly-symmetric complex normals with E|z|^2 = 1.

    Real and imaginary parts are i.i.d. N(0, 1/2). The real parts of all
    entries are drawn before the imaginary parts, row by row for 2-D sizes.
    """
    shape = (size,) if np.isscalar(size) else tuple(size)
    raw = rng.standard_normal(shape[:-1] + (2 * shape[-1],))
    half = shape[-1]
    return (raw[..., :half] + 1j * raw[..., half:]) / np.sqrt(2.0)
