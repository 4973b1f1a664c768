"""Permanent engines over exact and high-precision scalar domains.

``per_naive`` is the definition (sum over all permutations) and serves as
the reference oracle. ``per_ryser`` is Ryser's inclusion-exclusion formula

    Per(A) = (-1)^N  sum_{S subset [N]} (-1)^|S|  prod_i  sum_{j in S} a_ij

walked in binary-reflected Gray-code order so every step adds or removes a
single column from the running row sums.

Both accept ``int``, :class:`~permred.numerics.Dyadic`, ``Fraction``,
``gmpy2.mpc``/``mpfr`` or plain Python ``float``/``complex`` entries.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr, mpz

from .errors import BudgetError, ParseError
from .numerics import Dyadic, hp, precision, precision_of

__all__ = [
    "NAIVE_MAX_N",
    "RYSER_MAX_N",
    "format_matrix_text",
    "parse_matrix_text",
    "per_expanded",
    "per_naive",
    "per_ryser",
    "ryser_chunk_bits",
]

NAIVE_MAX_N = 9
RYSER_MAX_N = 32

_MPC = type(mpc(0))
_MPFR = type(mpfr(0))


def _as_rows(A):
    if isinstance(A, np.ndarray):
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {A.shape}")
        return [list(r) for r in A]
    rows = [list(r) for r in A]
    for r in rows:
        if len(r) != len(rows):
            raise ValueError("expected a square matrix")
    return rows


def per_naive(A):
    """Permanent by direct expansion over all N! permutations (N <= 9)."""
    rows = _as_rows(A)
    n = len(rows)
    if n > NAIVE_MAX_N:
        raise BudgetError(f"per_naive refuses N={n} > {NAIVE_MAX_N} ({math.factorial(n)} terms)")
    if n == 0:
        return 1
    p = precision_of(v for r in rows for v in r)
    if p is None:
        return _naive_sum(rows, n)
    with precision(p):
        return _naive_sum(rows, n)


def _naive_sum(rows, n):
    total = 0
    for sigma in itertools.permutations(range(n)):
        total = total + math.prod(rows[i][sigma[i]] for i in range(n))
    return total


def ryser_chunk_bits(n: int) -> int:
    """Number of high columns fixed per chunk. Depends on N only, never on workers."""
    return max(0, min(6, n - 12))


def per_ryser(A, workers: int = 1):
    """Permanent by Ryser's formula with Gray-code row-sum updates (N <= 32).

    The 2**N subsets are split into ``2**ryser_chunk_bits(N)`` contiguous
    chunks (one per assignment of the highest columns). Chunk sums are always
    added in ascending chunk order, so floating results are bit-identical for
    any ``workers`` count.
    """
    rows = _as_rows(A)
    n = len(rows)
    if n > RYSER_MAX_N:
        raise BudgetError(f"per_ryser refuses N={n} > {RYSER_MAX_N} (2^{n} subsets)")
    if n == 0:
        return 1
    flat = [v for r in rows for v in r]

    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in flat):
        int_rows = [[mpz(int(v)) for v in r] for r in rows]
        return int(_ryser(int_rows, n, None, workers))

    if all(isinstance(v, (int, Dyadic)) for v in flat):
        e = max((v.exponent for v in flat if isinstance(v, Dyadic)), default=0)
        num_rows = [[mpz(_dyadic_numerator(v, e)) for v in r] for r in rows]
        return Dyadic(int(_ryser(num_rows, n, None, workers)), e * n)

    if all(isinstance(v, (int, Fraction)) for v in flat):
        denom = math.lcm(*(Fraction(v).denominator for v in flat))
        num_rows = [[mpz(int(Fraction(v) * denom)) for v in r] for r in rows]
        return Fraction(int(_ryser(num_rows, n, None, workers)), denom**n)

    p = precision_of(flat)
    if p is not None:
        return _ryser_hp(rows, n, p, workers)

    return _ryser(rows, n, None, workers)


def _dyadic_numerator(v, e):
    if isinstance(v, Dyadic):
        return v.numerator << (e - v.exponent)
    return int(v) << e


def _ryser_hp(rows, n, p, workers):
    with precision(p):
        vals = [[hp(v, p) for v in r] for r in rows]
        real = all(v.imag == 0 for r in vals for v in r)
        row_bound = max(sum(abs(v) for v in r) for r in vals)
    # Gray-code terms can be as large as prod of row abs-sums while the result may be
    # tiny; guard bits keep the cancellation error below 2**-p.
    growth = max(0, int(math.ceil(float(gmpy2.log2(row_bound))))) if row_bound > 0 else 0
    inner = p + n * growth + n + 16
    with precision(inner):
        kernel_rows = [[(v.real if real else v) for v in r] for r in vals]
        total = _ryser(kernel_rows, n, inner, workers)
    with precision(p):
        return mpc(total)


def _ryser(rows, n, prec, workers):
    t = ryser_chunk_bits(n)
    cols = [tuple(rows[i][j] for i in range(n)) for j in range(n)]
    jobs = [(cols, n, t, c, prec) for c in range(1 << t)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_sum_job, jobs))
    else:
        partials = [_chunk_sum_job(job) for job in jobs]
    if prec is None:
        total = 0
        for s in partials:
            total = total + s
    else:
        with precision(prec):
            total = 0
            for s in partials:
                total = total + s
    return -total if n % 2 else total


def _chunk_sum_job(job):
    cols, n, t, chunk, prec = job
    if prec is None:
        return _chunk_sum(cols, n, t, chunk)
    with precision(prec):
        return _chunk_sum(cols, n, t, chunk)


def _chunk_sum(cols, n, t, chunk):
    """Signed sum of row-sum products over subsets whose top ``t`` columns equal ``chunk``."""
    low = n - t
    rs = [0] * n
    size = 0
    for b in range(t):
        if chunk >> b & 1:
            col = cols[low + b]
            rs = [r + c for r, c in zip(rs, col)]
            size += 1
    negative = size & 1
    total = 0
    if size:
        p = math.prod(rs)
        total = -p if negative else p
    for g in range(1, 1 << low):
        j = (g & -g).bit_length() - 1
        col = cols[j]
        if (g ^ (g >> 1)) >> j & 1:
            rs = [r + c for r, c in zip(rs, col)]
        else:
            rs = [r - c for r, c in zip(rs, col)]
        negative ^= 1
        p = math.prod(rs)
        total = total - p if negative else total + p
    return total


def per_expanded(U, S, T, workers: int = 1):
    """``Per(U_{S,T})``: permanent of the row/column-repeated submatrix."""
    from .fock import expand_submatrix

    return per_ryser(expand_submatrix(U, S, T), workers=workers)


def parse_matrix_text(text: str) -> list[list[int]]:
    """Parse the plain integer matrix format: a line ``N`` then N rows of N integers."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty matrix file")
    lineno, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(f"expected dimension, got {head!r}", lineno) from None
    if n < 0:
        raise ParseError("negative dimension", lineno)
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} rows, found {len(body)}", lineno)
    rows = []
    for lineno, ln in body:
        try:
            row = [int(tok) for tok in ln.split()]
        except ValueError:
            raise ParseError(f"non-integer entry in {ln!r}", lineno) from None
        if len(row) != n:
            raise ParseError(f"expected {n} entries, found {len(row)}", lineno)
        rows.append(row)
    return rows


def format_matrix_text(A) -> str:
    rows = _as_rows(A)
    out = [str(len(rows))]
    out.extend(" ".join(str(int(v)) for v in r) for r in rows)
    return "\n".join(out) + "\n"
