"""Certified upper and lower bounds on permanents of PSD matrices."""

from .circulant import circulant, solve_circulant
from .conjecture import ConjectureReport, check_pate, check_vdw_conjecture
from .constants import L, approx_factor, check_Lr_bounds, harmonic, sweep_Lr_bounds
from .errors import DimensionError, DomainError, NumericError, ParseError, PermcertError, SizeError
from .hermitian import check_hpsd, eigh, factorize_gram, loewner_leq
from .instances import InstanceSpec, random_instance
from .permanent import permanent_exact, permanent_mc_gaussian
from .rank_reduction import reduce_rank
from .relaxation import SolverOptions, rel, solve_dual
from .rounding import CertifiedBounds, best_of_k_rounding, certify_sandwich, lower_bound_from_vector
from .sphere import local_maximize_sphere

__version__ = "0.1.0"

__all__ = [
    "CertifiedBounds", "ConjectureReport", "DimensionError", "DomainError", "InstanceSpec",
    "L", "NumericError", "ParseError", "PermcertError", "SizeError", "SolverOptions",
    "approx_factor", "best_of_k_rounding", "certify_sandwich", "check_Lr_bounds", "check_hpsd",
    "check_pate", "check_vdw_conjecture", "circulant", "eigh", "factorize_gram", "harmonic",
    "local_maximize_sphere", "loewner_leq", "lower_bound_from_vector", "permanent_exact",
    "permanent_mc_gaussian", "random_instance", "reduce_rank", "rel", "solve_circulant",
    "solve_dual", "sweep_Lr_bounds",
]
