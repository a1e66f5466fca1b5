"""Rank growth of the relaxation optimum on random Gaussian instances.

For each n and instance index i the matrix is A = V^T V with V an n x n
standard Gaussian matrix from seed ``base_seed + i``. Each row records the rank
of the solver's dual point, the rank after reduction and the sqrt(n + 1)
reference curve.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .instances import InstanceSpec, random_instance
from .permanent import EXACT_CAP, permanent_exact
from .rank_reduction import numeric_rank
from .relaxation import rel
from .rounding import certify_sandwich

DEFAULT_N_LIST = (5, 10, 15, 20, 25, 30, 35, 40)
DEFAULT_INSTANCES = 50
RANK_TOL = 1e-6


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    seed: int
    rank_solver: int
    rank_reduced: int
    sqrt_bound: float
    log_rel: float
    log_lower: float
    log_per_exact: float | None = None


ROW_FIELDS = [f.name for f in fields(ExperimentRow)]


@dataclass(frozen=True)
class SummaryRow:
    n: int
    instances: int
    mean_rank_solver: float
    std_rank_solver: float
    mean_rank_reduced: float
    std_rank_reduced: float
    sqrt_bound: float


SUMMARY_FIELDS = [f.name for f in fields(SummaryRow)]


def run_instance(n, seed, exact=False, k_rounds=None):
    A = random_instance(InstanceSpec("random-gaussian", n, seed))
    result = rel(A)
    bounds = certify_sandwich(A, k_rounds=k_rounds, seed=seed, result=result)
    trace = bounds.reduction
    rank_solver = numeric_rank(result.solution.P, RANK_TOL)
    rank_reduced = trace.final_rank if trace is not None and not trace.aborted else rank_solver
    log_per = permanent_exact(A, log=True) if exact and n <= EXACT_CAP else None
    return ExperimentRow(n, seed, rank_solver, rank_reduced, math.sqrt(n + 1),
                         result.log_rel, bounds.log_lower, log_per)


def rank_growth(n_list=DEFAULT_N_LIST, instances_per_n=DEFAULT_INSTANCES, seed=0,
                workers=1, exact=False, k_rounds=None):
    """Rows sorted by (n, seed) regardless of the worker count."""
    jobs = [(n, seed + i) for n in n_list for i in range(instances_per_n)]

    def job(nj):
        return run_instance(nj[0], nj[1], exact=exact, k_rounds=k_rounds)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(job, jobs))
    else:
        rows = [job(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.n, r.seed))


def summarize(rows):
    out = []
    for n in sorted({r.n for r in rows}):
        rs = np.array([r.rank_solver for r in rows if r.n == n], dtype=float)
        rr = np.array([r.rank_reduced for r in rows if r.n == n], dtype=float)
        out.append(SummaryRow(n, rs.size, float(rs.mean()), float(rs.std()),
                              float(rr.mean()), float(rr.std()), math.sqrt(n + 1)))
    return out


def gnuplot_script(summary_csv="summary.csv"):
    """gnuplot commands plotting mean ranks with error bars against sqrt(n + 1)."""
    return (
        "set datafile separator ','\n"
        "set key top left\n"
        "set xlabel 'n'\n"
        "set ylabel 'rank'\n"
        f"plot '{summary_csv}' skip 1 using 1:3:4 with yerrorlines title 'solver rank', \\\n"
        f"     '{summary_csv}' skip 1 using 1:5:6 with yerrorlines title 'reduced rank', \\\n"
        f"     '{summary_csv}' skip 1 using 1:7 with lines title 'sqrt(n+1)'\n"
    )
