"""From a Boolean function to an integer matrix whose permanent encodes Delta_C.

Pipeline: circuit Q with <0|Q|0> = Delta_C / 2^n, optical compilation L,
mode matrix U, occupied submatrix V, truncation to ``b`` fractional bits
and scaling to the integer matrix A = round(2^b V). Then

    Delta_C = round(2^(n + 2*Gamma) * Per(A) / 2^(b*N))   (variant "w")
    Delta_C = round(2^n * Per(A) / 2^(b*N))               (variant "y")

with ``b`` large enough that truncation moves the quotient by at most 1/4.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .boolcirc import source_digest
from .errors import BudgetError, ParseError, RealnessError
from .klm import VARIANTS, LOCircuit, compile_circuit, entry_bound, extract_V, max_imag, mode_matrix
from .numerics import (
    DEFAULT_PRECISION,
    ceil_log2,
    precision,
    round_nearest_int,
    round_to_dyadic,
    tolerance,
    working_precision,
)
from .permanent import RYSER_MAX_N, per_ryser
from .qcirc import QCircuit, build_circuit

__all__ = [
    "FORMAT_VERSION",
    "PermanentInstance",
    "Reduction",
    "choose_b",
    "dump_instance",
    "load_instance",
    "recover",
    "recovery_quotient",
    "reduce",
    "reduce_trace",
    "truncate_V",
]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PermanentInstance:
    """Integer matrix A plus everything needed to turn Per(A) back into Delta_C."""

    A: tuple
    b: int
    n: int
    gamma: int
    k: int
    variant: str
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(tuple(int(v) for v in row) for row in self.A))
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if any(len(row) != len(self.A) for row in self.A):
            raise ValueError("A must be square")

    @property
    def N(self) -> int:
        return len(self.A)

    @property
    def scale_exponent(self) -> int:
        """Power of two multiplying Per(A)/2^(bN) in the recovery."""
        return self.n + 2 * self.gamma if self.variant == "w" else self.n


@dataclass(frozen=True)
class Reduction:
    """Intermediate objects of one reduction, kept for cross-checks."""

    Q: QCircuit
    L: LOCircuit
    U: np.ndarray
    V: np.ndarray
    M: int
    b: int
    p: int
    instance: PermanentInstance


def choose_b(n: int, N: int, gamma: int, M: int = 1) -> int:
    """Truncation bits: ceil(log2(N! * N * (M+1)^(N-1))) + n + 2 + 2*gamma + 8.

    Evaluated exactly with integers. With this b, rounding each entry of V to
    a multiple of 2^-b changes 2^(n+2*gamma) Per(V) by at most 2^-8 / 4.
    """
    if N < 1 or M < 1 or n < 0 or gamma < 0:
        raise ValueError("need N >= 1, M >= 1 and nonnegative n, gamma")
    core = math.factorial(N) * N * (M + 1) ** (N - 1)
    return ceil_log2(core) + n + 2 + 2 * gamma + 8


def truncate_V(V, b: int, imag_tol=None) -> list[list[int]]:
    """A_ij = round(2^b V_ij) (nearest, ties away from zero); rejects complex entries."""
    V = np.asarray(V, dtype=object)
    return [[round_to_dyadic(v, b, imag_tol).numerator for v in row] for row in V]


def _pipeline(C, variant, p, cubic, toffoli, ns1):
    Q = build_circuit(C, p, cubic=cubic, toffoli=toffoli)
    block = ns1(p) if callable(ns1) else ns1
    L = compile_circuit(Q, variant, block)
    U = mode_matrix(L)
    return Q, L, U, extract_V(U, L.layout)


def reduce_trace(
    C,
    variant: str = "w",
    p: int | None = None,
    *,
    cubic: str = "ancilla",
    toffoli: str = "relative",
    ns1=None,
    perturb: random.Random | None = None,
) -> Reduction:
    """Run the whole reduction and keep every intermediate.

    ``p`` is a floor on the working precision; the pipeline raises it to
    ``b + 64`` once b is known and recompiles if needed. ``ns1`` replaces
    the NS1 block (a matrix or a function of the precision). ``perturb``
    adds an independent uniform real offset in [-2^-b, 2^-b] to every entry
    of V before truncation.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    p0 = max(p or DEFAULT_PRECISION, DEFAULT_PRECISION)
    Q, L, U, V = _pipeline(C, variant, p0, cubic, toffoli, ns1)
    N = V.shape[0]
    with precision(p0):
        M = 1 if variant == "w" else entry_bound(V)
    b = choose_b(C.n, N, Q.gamma, M)
    pf = max(p0, working_precision(b))
    if pf > p0:
        Q, L, U, V = _pipeline(C, variant, pf, cubic, toffoli, ns1)

    imag = max_imag(V)
    if imag > tolerance(pf, 44):
        raise RealnessError(
            f"V has imaginary residue {float(imag):.3e} (N={N}, gamma={Q.gamma}); "
            "the compiled circuit contains complex gates"
        )
    if perturb is not None:
        with precision(pf):
            eps = gmpy2.mul_2exp(mpfr(1), -b)
            V = np.array(
                [[v.real + (2 * mpfr(perturb.random()) - 1) * eps for v in row] for row in V],
                dtype=object,
            )
    A = truncate_V(V, b)
    inst = PermanentInstance(A, b, C.n, Q.gamma, Q.k, variant, source_digest(C))
    return Reduction(Q, L, U, V, M, b, pf, inst)


def reduce(C, variant: str = "w", p: int | None = None, **options) -> PermanentInstance:
    """Emit the integer permanent instance for C (no size limit on N)."""
    return reduce_trace(C, variant, p, **options).instance


def _check_budget(inst):
    if inst.N > RYSER_MAX_N:
        raise BudgetError(
            f"recovery needs the permanent of a {inst.N}x{inst.N} matrix: "
            f"2^{inst.N} = {1 << inst.N} Ryser terms exceeds the N <= {RYSER_MAX_N} budget"
        )


def recovery_quotient(inst: PermanentInstance, per_A: int | None = None, workers: int = 1) -> Fraction:
    """Exact 2^s Per(A) / 2^(bN), the value that rounds to Delta_C."""
    if per_A is None:
        _check_budget(inst)
        per_A = per_ryser(inst.A, workers=workers)
    return Fraction(per_A << inst.scale_exponent, 1 << (inst.b * inst.N))


def recover(inst: PermanentInstance, workers: int = 1) -> int:
    """Delta_C from the instance via an exact integer permanent."""
    return round_nearest_int(recovery_quotient(inst, workers=workers))


# -- .pm.json ------------------------------------------------------------------

_KEYS = ("version", "n", "k", "gamma", "b", "N", "variant", "A", "provenance")


def dump_instance(inst: PermanentInstance) -> str:
    """Canonical .pm.json text: fixed key order, one matrix row per line."""
    head = {
        "version": FORMAT_VERSION,
        "n": inst.n,
        "k": inst.k,
        "gamma": inst.gamma,
        "b": inst.b,
        "N": inst.N,
        "variant": inst.variant,
    }
    lines = ["{"]
    lines += [f"  {json.dumps(key)}: {json.dumps(val)}," for key, val in head.items()]
    rows = [" [" + ", ".join(json.dumps(str(v)) for v in row) + "]" for row in inst.A]
    if rows:
        lines.append('  "A": [')
        lines.append(",\n".join("  " + r for r in rows))
        lines.append("  ],")
    else:
        lines.append('  "A": [],')
    lines.append(f'  "provenance": {json.dumps(inst.provenance)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> PermanentInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    missing = [key for key in _KEYS if key not in doc]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}")
    if doc["version"] != FORMAT_VERSION:
        raise ParseError(f"unsupported version {doc['version']!r}")
    for key in ("n", "k", "gamma", "b", "N"):
        if not isinstance(doc[key], int) or isinstance(doc[key], bool) or doc[key] < 0:
            raise ParseError(f"field {key!r} must be a nonnegative integer")
    if doc["variant"] not in VARIANTS:
        raise ParseError(f"variant must be one of {VARIANTS}, got {doc['variant']!r}")
    A = doc["A"]
    N = doc["N"]
    if not isinstance(A, list) or len(A) != N or any(not isinstance(r, list) or len(r) != N for r in A):
        raise ParseError(f"A must be an {N}x{N} array")
    try:
        rows = [[int(v) for v in row] for row in A]
    except (TypeError, ValueError):
        raise ParseError("A entries must be decimal integer strings") from None
    if any(not isinstance(v, str) for row in A for v in row):
        raise ParseError("A entries must be decimal integer strings")
    if not isinstance(doc["provenance"], str):
        raise ParseError("provenance must be a string")
    return PermanentInstance(rows, doc["b"], doc["n"], doc["gamma"], doc["k"], doc["variant"], doc["provenance"])
