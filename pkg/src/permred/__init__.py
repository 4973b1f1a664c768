"""Encode signed counts of Boolean functions as permanents of integer matrices.

A function C on n bits is turned into a qubit circuit whose all-zeros
amplitude is Delta_C / 2^n, then into a postselected linear-optics circuit,
and finally into an integer matrix A whose permanent, suitably rescaled and
rounded, equals Delta_C. Every stage has a brute-force oracle to check it.
"""
from .boolcirc import (
    Network,
    PhasePoly,
    TruthTable,
    corpus,
    delta,
    format_boolfunc,
    pad,
    parse_boolfunc,
)
from .errors import BudgetError, CircuitError, ParseError, PermredError, RealnessError
from .fock import check_homomorphism, enum_basis, expand_submatrix, phi_operator, transition_amp
from .klm import compile_circuit, extract_V, mode_matrix, ns1_lambdas
from .numerics import Dyadic, round_nearest_int, round_to_dyadic
from .permanent import per_naive, per_ryser
from .qcirc import QCircuit, amp00, build_circuit, dense_unitary, toffoli_circuit
from .reduce import PermanentInstance, choose_b, dump_instance, load_instance, recover, reduce, truncate_V
from .signsearch import SignOracle, determine_delta

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CircuitError",
    "Dyadic",
    "Network",
    "ParseError",
    "PermanentInstance",
    "PermredError",
    "PhasePoly",
    "QCircuit",
    "RealnessError",
    "SignOracle",
    "TruthTable",
    "amp00",
    "build_circuit",
    "check_homomorphism",
    "choose_b",
    "compile_circuit",
    "corpus",
    "delta",
    "dense_unitary",
    "determine_delta",
    "dump_instance",
    "enum_basis",
    "expand_submatrix",
    "extract_V",
    "format_boolfunc",
    "load_instance",
    "mode_matrix",
    "ns1_lambdas",
    "pad",
    "parse_boolfunc",
    "per_naive",
    "per_ryser",
    "phi_operator",
    "recover",
    "reduce",
    "round_nearest_int",
    "round_to_dyadic",
    "toffoli_circuit",
    "transition_amp",
    "truncate_V",
]
