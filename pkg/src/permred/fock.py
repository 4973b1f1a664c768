"""Brute-force photon-number simulator.

A Fock state of n photons in m modes is a tuple of m occupation numbers
summing to n. For an m x m mode matrix U the induced n-photon operator has
entries

    <S|phi(U)|T> = Per(U_{S,T}) / sqrt(s_1! ... s_m! t_1! ... t_m!)

where U_{S,T} repeats row i of U s_i times and column j t_j times. Nothing
here is clever; it exists to check the compiler against first principles.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import BudgetError
from .numerics import DEFAULT_PRECISION, factorial_product, hp, hp_matrix, precision, precision_of
from .permanent import per_naive, per_ryser

__all__ = [
    "BASIS_MAX",
    "OccupancyBasis",
    "PHI_MAX",
    "check_homomorphism",
    "enum_basis",
    "expand_submatrix",
    "phi_operator",
    "random_matrix",
    "random_unitary",
    "transition_amp",
]

BASIS_MAX = 10**6
PHI_MAX = 2000


@dataclass(frozen=True)
class OccupancyBasis:
    """All occupation tuples of ``n`` photons in ``m`` modes, lexicographically sorted."""

    m: int
    n: int
    states: tuple
    index: dict = field(compare=False, repr=False)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


def enum_basis(m: int, n: int) -> OccupancyBasis:
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 modes and n >= 0 photons")
    size = math.comb(m + n - 1, n)
    if size > BASIS_MAX:
        raise BudgetError(f"basis of {size} states exceeds {BASIS_MAX}")
    states = []
    # bars-and-stars: choose positions of m-1 bars among n+m-1 slots
    for bars in itertools.combinations(range(n + m - 1), m - 1):
        prev = -1
        occ = []
        for b in bars:
            occ.append(b - prev - 1)
            prev = b
        occ.append(n + m - 1 - prev - 1)
        states.append(tuple(occ))
    states.sort()
    return OccupancyBasis(m, n, tuple(states), {s: i for i, s in enumerate(states)})


def _repeat(occ):
    return [i for i, s in enumerate(occ) for _ in range(s)]


def expand_submatrix(U, S, T) -> np.ndarray:
    """U_{S,T}: s_i copies of row i and t_j copies of column j, in ascending mode order."""
    U = np.asarray(U, dtype=object)
    if len(S) != U.shape[0] or len(T) != U.shape[1]:
        raise ValueError("occupation tuples must have one entry per mode")
    if sum(S) != sum(T):
        raise ValueError(f"photon count mismatch: {sum(S)} vs {sum(T)}")
    rows, cols = _repeat(S), _repeat(T)
    return U[np.ix_(rows, cols)] if rows else np.empty((0, 0), dtype=object)


def _per(M):
    return per_naive(M) if len(M) <= 4 else per_ryser(M)


def transition_amp(U, S, T, p=None) -> mpc:
    """<S|phi(U)|T> evaluated at precision ``p`` (default: that of U's entries)."""
    sub = expand_submatrix(U, S, T)
    p = p or precision_of(np.asarray(U, dtype=object).flat) or DEFAULT_PRECISION
    with precision(p):
        norm = gmpy2.sqrt(mpfr(factorial_product(S) * factorial_product(T)))
        return hp(_per(sub), p) / norm


def phi_operator(U, n: int, p=None):
    """Matrix of phi(U) on the n-photon basis; returns (matrix, basis)."""
    U = np.asarray(U, dtype=object)
    m = U.shape[0]
    basis = enum_basis(m, n)
    if len(basis) > PHI_MAX:
        raise BudgetError(f"phi_operator refuses basis of {len(basis)} > {PHI_MAX} states")
    p = p or precision_of(U.flat) or DEFAULT_PRECISION
    out = np.empty((len(basis), len(basis)), dtype=object)
    for i, S in enumerate(basis):
        for j, T in enumerate(basis):
            out[i, j] = transition_amp(U, S, T, p)
    return out, basis


def check_homomorphism(U, V, n: int, p=None) -> mpfr:
    """max over S,T of |Per((VU)_{S,T}) - sum_R Per(V_{S,R}) Per(U_{R,T}) / prod r_i!|.

    Works for arbitrary (not only unitary) square matrices.
    """
    U = np.asarray(U, dtype=object)
    V = np.asarray(V, dtype=object)
    m = U.shape[0]
    p = p or precision_of(list(U.flat) + list(V.flat)) or DEFAULT_PRECISION
    U = hp_matrix(U, p)
    V = hp_matrix(V, p)
    basis = enum_basis(m, n).states
    with precision(p):
        VU = V.dot(U)
        left = [[_per(expand_submatrix(V, S, R)) for R in basis] for S in basis]
        right = [[_per(expand_submatrix(U, R, T)) for T in basis] for R in basis]
        weights = [mpfr(factorial_product(R)) for R in basis]
        worst = mpfr(0)
        for a, S in enumerate(basis):
            for c, T in enumerate(basis):
                direct = _per(expand_submatrix(VU, S, T))
                via = mpc(0)
                for r in range(len(basis)):
                    via += left[a][r] * right[r][c] / weights[r]
                worst = max(worst, abs(direct - via))
    return worst


def random_matrix(m: int, rng: random.Random, p=DEFAULT_PRECISION) -> np.ndarray:
    """m x m matrix with independent standard Gaussian real and imaginary parts."""
    with precision(p):
        out = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                out[i, j] = mpc(rng.gauss(0.0, 1.0), rng.gauss(0.0, 1.0))
    return out


def random_unitary(m: int, rng: random.Random, p=DEFAULT_PRECISION) -> np.ndarray:
    """Gram-Schmidt (columns left to right) of a Gaussian matrix, at precision p."""
    G = random_matrix(m, rng, p)
    with precision(p):
        cols = []
        for j in range(m):
            v = [G[i, j] for i in range(m)]
            # two passes keep the columns orthogonal to working precision
            for _ in range(2):
                for c in cols:
                    dot = sum((c[i].conjugate() * v[i] for i in range(m)), mpc(0))
                    v = [v[i] - dot * c[i] for i in range(m)]
            norm = gmpy2.sqrt(sum((abs(x) ** 2 for x in v), mpfr(0)))
            cols.append([x / norm for x in v])
        out = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                out[i, j] = cols[j][i]
    return out
