"""Recover Delta_C exactly from sign queries sign(Delta_C + k).

The search probes k = 0 first (Delta_C = 0 ends it at once). Otherwise it
walks away from zero with K = 1, 2, 4, ... until sign(Delta_C -/+ K) stops
agreeing with the first answer, then bisects the open bracket that is left.
At most 2*ceil(log2(|Delta_C| + 2)) + 4 queries are made.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boolcirc import PaddedFunc, delta, source_digest
from .errors import BudgetError
from .permanent import RYSER_MAX_N
from .reduce import recover, reduce

__all__ = ["BACKENDS", "SearchResult", "SignOracle", "call_bound", "determine_delta", "sign"]

BACKENDS = ("brute", "permanent")


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


class SignOracle:
    """Answers sign(Delta_C + k) and counts how often it was asked.

    ``backend="brute"`` evaluates Delta_C by enumeration. ``"permanent"``
    builds the integer instance for C and recovers Delta_C from its
    permanent; the shift by k is applied to the recovered value, which is
    what padding C with k extra satisfying inputs would produce. Either way
    Delta_C is computed once per function and reused for later k.
    """

    def __init__(self, backend: str = "brute", variant: str = "w", max_N: int = RYSER_MAX_N, workers: int = 1):
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
        self.backend = backend
        self.variant = variant
        self.max_N = min(max_N, RYSER_MAX_N)
        self.workers = workers
        self.calls = 0
        self._cache: dict[str, int] = {}

    def _delta(self, C) -> int:
        if isinstance(C, PaddedFunc):
            return self._delta(C.base) + C.k
        key = source_digest(C)
        if key not in self._cache:
            if self.backend == "brute":
                self._cache[key] = delta(C)
            else:
                inst = reduce(C, self.variant)
                if inst.N > self.max_N:
                    raise BudgetError(
                        f"permanent backend refuses N={inst.N} > {self.max_N} "
                        f"(2^{inst.N} = {1 << inst.N} Ryser terms)"
                    )
                self._cache[key] = recover(inst, self.workers)
        return self._cache[key]

    def __call__(self, C, k: int) -> int:
        self.calls += 1
        return _sgn(self._delta(C) + k)


def sign(oracle: SignOracle, C, k: int) -> int:
    """sign(Delta_C + k) in {-1, 0, +1}."""
    return oracle(C, k)


@dataclass
class SearchResult:
    delta: int
    probes: list = field(default_factory=list)

    @property
    def calls(self) -> int:
        return len(self.probes)


def call_bound(d: int) -> int:
    """Maximum number of probes the search may use when the answer is ``d``."""
    return 2 * math.ceil(math.log2(abs(d) + 2)) + 4


def determine_delta(oracle: SignOracle, C) -> SearchResult:
    """Find Delta_C using only sign queries; ``probes`` lists every (k, sign) asked."""
    probes = []

    def ask(k):
        s = oracle(C, k)
        probes.append((k, s))
        return s

    s0 = ask(0)
    if s0 == 0:
        return SearchResult(0, probes)
    # work with d = s0 * Delta_C > 0; probing sign(d - K) means k = -s0 * K
    lo, K = 0, 1
    while True:
        s = s0 * ask(-s0 * K)
        if s == 0:
            return SearchResult(s0 * K, probes)
        if s < 0:
            hi = K
            break
        lo, K = K, 2 * K
    # lo < d < hi, both bounds already excluded
    while hi - lo > 2:
        mid = (lo + hi) // 2
        s = s0 * ask(-s0 * mid)
        if s == 0:
            return SearchResult(s0 * mid, probes)
        if s > 0:
            lo = mid
        else:
            hi = mid
    return SearchResult(s0 * (lo + 1), probes)
