"""Seeded test instances A = V^H V."""

from dataclasses import dataclass, field

import numpy as np

from .circulant import circulant
from .errors import ParseError
from .rng import INSTANCE, complex_normal, make_rng

KINDS = ("file", "random-gaussian", "circulant", "diagonal", "rank1")


@dataclass(frozen=True)
class InstanceSpec:
    """``params`` by kind: file {"path"}, circulant {"first_row"},
    diagonal {"d"}, rank1 {"v"} (optional; drawn from the seed otherwise)."""

    kind: str
    n: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)


def gaussian_factor(n, seed):
    """Real n x n factor with standard Gaussian entries on stream (seed, INSTANCE, n)."""
    return make_rng(seed, INSTANCE, n).standard_normal((n, n))


def random_instance(spec):
    kind = spec.kind
    p = spec.params
    if kind == "random-gaussian":
        if spec.n < 1:
            raise ValueError("random-gaussian needs n >= 1")
        V = gaussian_factor(spec.n, spec.seed)
        return V.T @ V
    if kind == "circulant":
        c = np.asarray(p["first_row"])
        A = circulant(c)
        return A if np.iscomplexobj(A) else A.astype(float)
    if kind == "diagonal":
        return np.diag(np.asarray(p["d"], dtype=float))
    if kind == "rank1":
        if "v" in p:
            v = np.asarray(p["v"], dtype=complex)
        else:
            v = complex_normal(make_rng(spec.seed, INSTANCE, spec.n), spec.n)
        return np.outer(v.conj(), v)
    if kind == "file":
        from .serialize import load_matrix

        return load_matrix(p["path"])
    raise ParseError(f"unknown instance kind {kind!r}; expected one of {', '.join(KINDS)}")
