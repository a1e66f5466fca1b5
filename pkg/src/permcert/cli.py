"""Command-line front end: ``permcert <command> [input] [options]``.

Exit codes: 0 success, 1 input error, 2 certificate validation failure.
"""

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import serialize
from .circulant import circulant
from .conjecture import check_pate, check_vdw_conjecture
from .errors import PermcertError
from .experiments import (DEFAULT_INSTANCES, DEFAULT_N_LIST, ROW_FIELDS, SUMMARY_FIELDS,
                          gnuplot_script, rank_growth, summarize)
from .hermitian import as_hermitian, factorize_gram
from .instances import InstanceSpec, random_instance
from .permanent import EXACT_CAP, permanent_exact, permanent_mc_gaussian
from .rank_reduction import reduce_rank
from .relaxation import psd_factor, rel
from .rounding import best_of_k_rounding, certify_sandwich, expected_rounding_value, lower_bound_from_vector
from .serialize import load_matrix

logger = logging.getLogger("permcert")

EXIT_OK, EXIT_INPUT, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc


def _add_input(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--input", metavar="PATH", help="matrix JSON file")
    g.add_argument("--random", nargs=2, type=int, metavar=("N", "SEED"),
                   help="A = V^T V with V an N x N standard Gaussian matrix")
    g.add_argument("--circulant", metavar="C0,C1,...", help="circulant matrix from its first row")


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $PERMCERT_SEED or 0)")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = _Parser(prog="permcert", description="Certified bounds on permanents of PSD matrices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", help="certified lower and upper bounds on per(A)")
    _add_input(p)
    _add_common(p)
    p.add_argument("--exact", action="store_true", help=f"also compute per(A) exactly (n <= {EXACT_CAP})")
    p.add_argument("--k-rounds", type=int, default=None)
    p.add_argument("--no-reduce", action="store_true", help="skip rank reduction before rounding")

    p = sub.add_parser("solve", help="solve the relaxation and emit the diagonal certificate")
    _add_input(p)
    _add_common(p)

    p = sub.add_parser("round", help="round the relaxation optimum to a sphere point")
    _add_input(p)
    _add_common(p)
    p.add_argument("--k-rounds", type=int, default=None)
    p.add_argument("--samples", type=int, default=0,
                   help="also estimate the expected rounding value from this many draws")
    p.add_argument("--no-reduce", action="store_true")

    p = sub.add_parser("rank-growth", help="rank of the relaxation optimum versus n")
    _add_common(p)
    p.add_argument("--n-list", type=_int_list, default=list(DEFAULT_N_LIST))
    p.add_argument("--instances", type=int, default=DEFAULT_INSTANCES)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--summary", metavar="PATH", help="write per-n summary CSV here")
    p.add_argument("--gnuplot", metavar="PATH", help="write a gnuplot script for the summary")

    p = sub.add_parser("conjecture", help="search for r(A) and check the conjectured sandwich")
    _add_input(p)
    _add_common(p)
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--batch", type=int, default=1,
                   help="with --random, run this many consecutive seeds")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("pate", help="check per(A kron J_k) >= per(A)^k (k!)^n")
    _add_input(p)
    _add_common(p)
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("estimate", help="Monte Carlo permanent estimate")
    _add_input(p)
    _add_common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact", action="store_true")
    return parser


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PERMCERT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"PERMCERT_SEED is not an integer: {env!r}") from exc


def _matrix(args, random_seed=None):
    if args.input:
        A = load_matrix(args.input)
    elif args.random:
        n, s = args.random
        A = random_instance(InstanceSpec("random-gaussian", n, s if random_seed is None else random_seed))
    else:
        try:
            row = [complex(t.strip().replace(" ", "")) for t in args.circulant.split(",") if t.strip()]
        except ValueError as exc:
            raise InputError(f"bad --circulant row {args.circulant!r}") from exc
        if not row:
            raise InputError("empty --circulant row")
        A = circulant(np.array(row))
        if not np.any(A.imag):
            A = A.real
    A = as_hermitian(A)
    factorize_gram(A)  # rejects matrices that are not PSD
    return A


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exact_log_per(A, wanted):
    if not wanted:
        return None
    if A.shape[0] > EXACT_CAP:
        logger.warning("n = %d exceeds the exact cap %d; skipping the exact permanent", A.shape[0], EXACT_CAP)
        return None
    return permanent_exact(A, log=True)


def cmd_certify(args):
    A = _matrix(args)
    seed = _seed(args)
    bounds = certify_sandwich(A, k_rounds=args.k_rounds, reduce=not args.no_reduce, seed=seed)
    log_per = _exact_log_per(A, args.exact)
    obj = serialize.certificate_obj(bounds, log_per)
    if args.format == "csv":
        keys = ["n", "log_lower", "log_upper", "log_rel", "rank_r", "validated", "seed"]
        keys += ["log_per_exact"] if log_per is not None else []
        _emit(args, serialize.rows_to_csv([obj], keys))
    else:
        _emit(args, serialize.dumps(obj))
    ok = bounds.validated and obj.get("contained", True)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_solve(args):
    A = _matrix(args)
    result = rel(A)
    obj = serialize.solution_obj(result)
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv([obj], ["n", "log_rel", "gap_ratio", "iterations", "rank"]))
    else:
        _emit(args, serialize.dumps(obj))
    return EXIT_OK if result.certificate.validated else EXIT_INVALID


def cmd_round(args):
    A = _matrix(args)
    seed = _seed(args)
    n = A.shape[0]
    result = rel(A)
    if result.solution is None:
        raise InputError("A has a zero diagonal entry; per(A) = 0 and there is nothing to round")
    U = result.solution.U
    if not args.no_reduce:
        P, trace = reduce_rank(result.V, result.solution.P)
        if not trace.aborted:
            U = psd_factor(P)
    k = args.k_rounds if args.k_rounds is not None else 64 * n
    w = best_of_k_rounding(U, result.V, k, seed)
    obj = {
        "n": n,
        "rank_r": U.shape[1],
        "k_rounds": k,
        "seed": seed,
        "objective_log": w.objective_log,
        "log_lower": lower_bound_from_vector(result.V, w.y),
        "log_rel": result.log_rel,
        "witness_y": serialize.encode_complex_vector(w.y),
    }
    if args.samples:
        est = expected_rounding_value(U, result.V, args.samples, seed)
        obj["expected_log_mean"] = est.log_mean
        obj["expected_log_std_error"] = est.log_std_error
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv([obj], ["n", "rank_r", "objective_log", "log_lower", "log_rel", "seed"]))
    else:
        _emit(args, serialize.dumps(obj))
    return EXIT_OK


def cmd_rank_growth(args):
    if any(n < 1 for n in args.n_list) or args.instances < 1:
        raise InputError("n values and --instances must be positive")
    rows = rank_growth(args.n_list, args.instances, _seed(args), workers=args.workers, exact=args.exact)
    summary = summarize(rows)
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv(rows, ROW_FIELDS))
    else:
        _emit(args, serialize.dumps({"rows": rows, "summary": summary}))
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(serialize.rows_to_csv(summary, SUMMARY_FIELDS))
    if args.gnuplot:
        with open(args.gnuplot, "w") as fh:
            fh.write(gnuplot_script(args.summary or "summary.csv"))
    return EXIT_OK


_REPORT_FIELDS = ["instance_id", "log_r_lower", "log_per", "log_nu", "lower_holds",
                  "upper_consistent", "counterexample_flag", "status", "starts", "seed"]


def cmd_conjecture(args):
    seed = _seed(args)
    if args.batch > 1 and not args.random:
        raise InputError("--batch needs --random N SEED")
    reports = []
    for b in range(args.batch):
        if args.random:
            s = args.random[1] + b
            A = _matrix(args, random_seed=s)
            iid = f"random-gaussian:n={args.random[0]}:seed={s}"
        else:
            A = _matrix(args)
            iid = args.input or f"circulant:{args.circulant}"
        reports.append(check_vdw_conjecture(A, starts=args.starts, seed=seed, instance_id=iid,
                                            workers=args.workers))
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv(reports, _REPORT_FIELDS))
    else:
        _emit(args, serialize.dumps(reports[0] if len(reports) == 1 else reports))
    return EXIT_OK if all(r.lower_holds for r in reports) else EXIT_INVALID


def cmd_pate(args):
    A = _matrix(args)
    res = check_pate(A, args.k)
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv([res], ["n", "k", "lhs_log", "rhs_log", "holds"]))
    else:
        _emit(args, serialize.dumps(res))
    return EXIT_OK


def cmd_estimate(args):
    A = _matrix(args)
    seed = _seed(args)
    if args.samples < 1:
        raise InputError("--samples must be >= 1")
    est = permanent_mc_gaussian(factorize_gram(A), args.samples, seed, workers=args.workers)
    obj = {"n": A.shape[0], "seed": seed, **serialize._clean(est)}
    log_per = _exact_log_per(A, args.exact)
    if log_per is not None:
        obj["log_per_exact"] = log_per
        obj["within_3_std_error"] = est.within(math.exp(log_per))
    if args.format == "csv":
        _emit(args, serialize.rows_to_csv([obj], ["n", "samples", "mean", "std_error", "seed"]))
    else:
        _emit(args, serialize.dumps(obj))
    return EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "solve": cmd_solve,
    "round": cmd_round,
    "rank-growth": cmd_rank_growth,
    "conjecture": cmd_conjecture,
    "pate": cmd_pate,
    "estimate": cmd_estimate,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (PermcertError, InputError, OSError, ValueError) as exc:
        print(f"permcert {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
