"""JSON and CSV serialization.

Matrices use {"n": int, "entries": rows} with each entry either a bare number
or a pair [re, im]. Output JSON has sorted keys and writes non-finite floats
as null, so equal inputs give byte-identical files.
"""

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError


def _entry(x):
    if isinstance(x, bool):
        raise ParseError("boolean matrix entry")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    raise ParseError(f"bad matrix entry {x!r}; expected a number or [re, im]")


def matrix_from_obj(obj):
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ParseError('matrix JSON needs an "entries" field')
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError('"entries" must be a non-empty list of rows')
    n = obj.get("n", len(rows))
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ParseError(f"entries are not {n} x {n}")
    A = np.array([[_entry(x) for x in r] for r in rows], dtype=complex)
    return A.real.copy() if not np.any(A.imag) else A


def load_matrix(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_obj(obj)


def encode_complex_vector(x):
    return [[float(z.real), float(z.imag)] for z in np.asarray(x, dtype=complex)]


def matrix_to_obj(A):
    A = np.asarray(A)
    if np.iscomplexobj(A) and np.any(A.imag):
        rows = [encode_complex_vector(r) for r in A]
    else:
        rows = [[float(x) for x in r] for r in A.real]
    return {"n": int(A.shape[0]), "entries": rows}


def _clean(obj):
    # json-safe copy with non-finite floats mapped to None
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _clean(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def solution_obj(result):
    """Solution JSON for a relaxation result."""
    sol = result.solution
    cert = result.certificate
    return {
        "n": result.n,
        "log_rel": result.log_rel,
        "gap_ratio": sol.gap_ratio if sol is not None else 1.0,
        "iterations": sol.iterations if sol is not None else 0,
        "converged": sol.converged if sol is not None else True,
        "rank": sol.rank if sol is not None else 0,
        "certificate": {
            "d": cert.d,
            "lambda": cert.lam,
            "validated": cert.validated,
            "log_upper": cert.log_upper,
        },
    }


def certificate_obj(bounds, log_per_exact=None):
    """Certificate JSON for :class:`CertifiedBounds`."""
    obj = {
        "n": bounds.n,
        "log_lower": bounds.log_lower,
        "log_upper": bounds.log_upper,
        "log_rel": bounds.log_rel,
        "witness_y": encode_complex_vector(bounds.witness.y),
        "rank_r": bounds.rank_r,
        "a_priori_log_factor": bounds.log_factor,
        "a_priori_log_lower": bounds.a_priori_log_lower,
        "converged": bounds.converged,
        "validated": bounds.validated,
        "loose": bounds.loose,
        "seed": bounds.seed,
        "k_rounds": bounds.k_rounds,
    }
    if log_per_exact is not None:
        obj["log_per_exact"] = log_per_exact
        obj["contained"] = bool(
            bounds.log_lower <= log_per_exact + 1e-9 * max(1.0, abs(log_per_exact))
            and log_per_exact <= bounds.log_upper + 1e-9 * max(1.0, abs(bounds.log_upper))
        ) if math.isfinite(log_per_exact) else bounds.log_upper == -math.inf
    tr = bounds.reduction
    if tr is not None:
        obj["reduction"] = {
            "initial_rank": tr.initial_rank,
            "final_rank": tr.final_rank,
            "steps": len(tr.steps),
            "objective_drift": tr.objective_drift,
            "functional_drift": tr.functional_drift,
            "aborted": tr.aborted,
        }
    return obj


def rows_to_csv(rows, fieldnames):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = dataclasses.asdict(r) if dataclasses.is_dataclass(r) else dict(r)
        w.writerow({k: _csv_value(d[k]) for k in fieldnames})
    return buf.getvalue()


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("-inf" if v < 0 else "inf" if v > 0 else "nan")
    return v
