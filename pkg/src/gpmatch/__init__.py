"""Generalised pattern matching: exact, randomized and deterministic algorithms."""
from .convolution import correlate_sum, cross_correlate, dc_mismatch_count, dc_string
from .core import (InputError, IntervalRelation, MatchRelation, MismatchTable, brute_count,
                   brute_report, param_I)
from .deterministic import count_det_d, count_det_s, report_det
from .discrepancy import SetSystem, build_partition, colour, compute_epsilon
from .intervals import count_exact_i, greedy_partition, threshold_count
from .randomized import MonteCarloConfig, count_approx, find_prime, report_d, report_s
from .superimposed import build_code, irreducible_polys, mod_table, verify_code

__all__ = [
    "InputError", "IntervalRelation", "MatchRelation", "MismatchTable", "MonteCarloConfig",
    "SetSystem", "brute_count", "brute_report", "build_code", "build_partition", "colour",
    "compute_epsilon", "correlate_sum", "count_approx", "count_det_d", "count_det_s",
    "count_exact_i", "cross_correlate", "dc_mismatch_count", "dc_string", "find_prime",
    "greedy_partition", "irreducible_polys", "mod_table", "param_I", "report_d", "report_det",
    "report_s", "threshold_count", "verify_code",
]
