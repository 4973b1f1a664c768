"""Invariant checks runnable without pytest (used by ``permred selftest``)."""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpc, mpfr

from .fock import check_homomorphism, expand_submatrix, random_matrix, random_unitary, transition_amp
from .klm import compile_circuit, logical_action, ns1_block, ns1_lambdas
from .numerics import DEFAULT_PRECISION, precision, tolerance
from .permanent import per_ryser
from .qcirc import CSign, QCircuit, csign_count, dense_unitary, toffoli_circuit

__all__ = ["CheckResult", "corrupted_w", "run_selftest"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def corrupted_w(p=DEFAULT_PRECISION) -> tuple:
    """W with its (3,3) entry nudged by 1e-6; a mutation the suite must catch."""
    rows = [list(r) for r in ns1_block("w", p)]
    with precision(p):
        rows[2][2] = rows[2][2] + mpfr("1e-6")
    return tuple(tuple(r) for r in rows)


def _dev(values, targets, p):
    with precision(p):
        return max(abs(mpc(v) - t) for v, t in zip(values, targets))


def _check_lambdas(variant, p, block):
    want = (0.5, 0.5, -0.5) if variant == "w" else (1, 1, -1)
    got = ns1_lambdas(variant, p, block)
    dev = _dev(got, want, p)
    return CheckResult(f"ns1_{variant}", dev <= tolerance(p, 40), f"max deviation {float(dev):.3e}")


def _check_csign(variant, p, block):
    L = compile_circuit(QCircuit(2, [CSign(0, 1)], None, p), variant, block)
    act = logical_action(L)
    scale = 0.25 if variant == "w" else 1
    want = np.diag([scale, scale, scale, -scale])
    dev = _dev(act.flat, want.flat, p)
    return CheckResult(f"csign_{variant}", dev <= tolerance(p, 40), f"max deviation {float(dev):.3e}")


def _check_toffoli(p):
    Q = toffoli_circuit(p)
    T = np.eye(8)
    T[[6, 7]] = T[[7, 6]]
    dev = _dev(dense_unitary(Q).flat, T.flat, p)
    ok = dev <= tolerance(p, 40) and csign_count(Q) == 6
    return CheckResult("toffoli", ok, f"max deviation {float(dev):.3e}, {csign_count(Q)} CSIGNs")


def _check_worked_example(p):
    with precision(p):
        U = np.array([[mpc(1), mpc(0)], [mpc(0), mpc(-1)]], dtype=object)
    sub = expand_submatrix(U, (2, 1), (2, 1))
    want = [[1, 1, 0], [1, 1, 0], [0, 0, -1]]
    amp = transition_amp(U, (2, 1), (2, 1), p)
    ok = [[int(v.real) for v in r] for r in sub] == want and _dev([amp], [-1], p) <= tolerance(p, 40)
    return CheckResult("fock_example", ok, f"amplitude {complex(amp)}")


def _check_homomorphism(p, trials, rng):
    worst = mpfr(0)
    for t in range(trials):
        m = rng.randint(1, 4)
        n = rng.randint(1, 3)
        if t % 2:
            U, V = random_matrix(m, rng, p), random_matrix(m, rng, p)
        else:
            U, V = random_unitary(m, rng, p), random_unitary(m, rng, p)
        worst = max(worst, check_homomorphism(U, V, n, p))
    return CheckResult("homomorphism", worst <= tolerance(p, 40), f"{trials} pairs, max deviation {float(worst):.3e}")


def _check_unitary_permanent_bound(p, trials, rng):
    worst = mpfr(0)
    for t in range(trials):
        U = random_unitary(2 + t % 6, rng, p)
        with precision(p):
            worst = max(worst, abs(per_ryser(U)))
    bound = 1 + tolerance(p, 40)
    return CheckResult("unitary_per_bound", worst <= bound, f"{trials} unitaries, max |Per| {float(worst):.6f}")


def run_selftest(quick: bool = False, p: int = DEFAULT_PRECISION, corrupt_w: bool = False, seed: int = 0):
    """Run the gadget, Toffoli, photon-amplitude, homomorphism and unitary-permanent bound checks."""
    rng = random.Random(seed)
    w_block = corrupted_w(p) if corrupt_w else None
    results = [
        _check_lambdas("w", p, w_block),
        _check_lambdas("y", p, None),
        _check_csign("w", p, w_block),
        _check_csign("y", p, None),
        _check_worked_example(p),
    ]
    if not quick:
        results.append(_check_toffoli(p))
    results.append(_check_homomorphism(p, 10 if quick else 100, rng))
    results.append(_check_unitary_permanent_bound(p, 12 if quick else 100, rng))
    return results
