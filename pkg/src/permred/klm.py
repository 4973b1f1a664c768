"""Compile qubit circuits to postselected linear-optics circuits.

Dual rail: qubit q owns modes 2q ("(q,0)", holds the photon for |1>) and
2q+1 ("(q,1)", holds the photon for |0>), so the all-zeros register starts
as the alternating pattern 0,1,0,1,... A 1-qubit gate becomes its own 2x2
block on those two modes. Each CSIGN(i, j) becomes

    H-block on ((i,0), (j,0))  ->  NS1 on (i,0)  ->  NS1 on (j,0)  ->  H-block

with NS1 realised by postselection on fresh ancilla modes:

* variant ``"w"``: the 3x3 unitary W on (target, empty ancilla, one-photon
  ancilla); each NS1 succeeds with amplitude 1/2, so a CSIGN with 1/4.
* variant ``"y"``: the 2x2 non-unitary Y on (target, one-photon ancilla);
  amplitudes are exactly 1, 1, -1 and no attenuation occurs.

Mode matrices are composed latest-gate-leftmost (acting on column vectors).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import CircuitError
from .fock import transition_amp
from .numerics import DEFAULT_PRECISION, precision
from .qcirc import CSign, OneQubit, QCircuit

__all__ = [
    "LOCircuit",
    "LOGate",
    "ModeLayout",
    "NS1Record",
    "VARIANTS",
    "compile_circuit",
    "dual_rail_state",
    "entry_bound",
    "extract_V",
    "format_lo",
    "hadamard_block",
    "logical_action",
    "max_imag",
    "mode_matrix",
    "ns1_block",
    "ns1_lambdas",
]

VARIANTS = ("w", "y")


@dataclass(frozen=True)
class LOGate:
    """A small block acting on ``modes`` (direct sum with the identity elsewhere)."""

    block: tuple
    modes: tuple
    unitary: bool = True


@dataclass(frozen=True)
class NS1Record:
    """One NS1 instance: the target mode and its fresh ancillas with required occupations."""

    target: int
    ancillas: tuple
    occupations: tuple


@dataclass(frozen=True)
class ModeLayout:
    m: int
    qubit_modes: tuple
    ns1: tuple
    occupancy: tuple

    @property
    def occupied(self) -> list[int]:
        return [i for i, s in enumerate(self.occupancy) if s]

    @property
    def photons(self) -> int:
        return sum(self.occupancy)


@dataclass(frozen=True)
class LOCircuit:
    layout: ModeLayout
    gates: tuple
    variant: str
    gamma: int
    prec: int = DEFAULT_PRECISION


def _block(entries, p):
    with precision(p):
        return tuple(tuple(mpc(v) for v in row) for row in entries)


def hadamard_block(p=DEFAULT_PRECISION) -> tuple:
    with precision(p):
        r = 1 / gmpy2.sqrt(mpfr(2))
        return _block(((r, r), (r, -r)), p)


def w_matrix(p=DEFAULT_PRECISION) -> tuple:
    with precision(p):
        s2 = gmpy2.sqrt(mpfr(2))
        a = 1 - s2
        b = gmpy2.sqrt(3 / s2 - 2)
        c = 1 / gmpy2.root(mpfr(2), 4)
        d = s2 - mpfr(1) / 2
        e = mpfr(1) / 2 - 1 / s2
        f = mpfr(1) / 2
        return _block(((a, b, c), (b, d, e), (c, e, f)), p)


def y_matrix(p=DEFAULT_PRECISION) -> tuple:
    with precision(p):
        s2 = gmpy2.sqrt(mpfr(2))
        return _block(((1 - s2, s2), (1, 1)), p)


def ns1_block(variant: str, p=DEFAULT_PRECISION) -> tuple:
    """The W (3x3) or Y (2x2) block realising NS1 under postselection."""
    if variant == "w":
        return w_matrix(p)
    if variant == "y":
        return y_matrix(p)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _ancilla_occupations(variant):
    return (0, 1) if variant == "w" else (1,)


def ns1_lambdas(variant: str, p=DEFAULT_PRECISION, block=None) -> tuple:
    """(lambda_0, lambda_1, lambda_2): postselected amplitudes on 0, 1, 2 target photons."""
    block = ns1_block(variant, p) if block is None else block
    anc = _ancilla_occupations(variant)
    U = np.array(block, dtype=object)
    return tuple(transition_amp(U, (s,) + anc, (s,) + anc, p) for s in range(3))


def compile_circuit(Q: QCircuit, variant: str = "w", ns1=None) -> LOCircuit:
    """Translate Q gate by gate into a linear-optics circuit.

    ``ns1`` overrides the NS1 block (used to test that a corrupted gadget
    constant is caught).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    p = Q.prec
    k = Q.k
    nsb = ns1_block(variant, p) if ns1 is None else ns1
    hb = hadamard_block(p)
    anc_occ = _ancilla_occupations(variant)
    occupancy = [0, 1] * k
    qubit_modes = tuple((2 * q, 2 * q + 1) for q in range(k))
    records = []
    gates = []

    def ns1_on(target):
        start = len(occupancy)
        modes = tuple(range(start, start + len(anc_occ)))
        occupancy.extend(anc_occ)
        records.append(NS1Record(target, modes, anc_occ))
        gates.append(LOGate(nsb, (target,) + modes, variant == "w"))

    for g in Q.gates:
        if isinstance(g, OneQubit):
            q = g.target
            # block basis order (|0>, |1>) = (photon in (q,1), photon in (q,0))
            gates.append(LOGate(g.matrix, (2 * q + 1, 2 * q), g.unitary))
        elif isinstance(g, CSign):
            a, b = 2 * g.q1, 2 * g.q2
            gates.append(LOGate(hb, (a, b)))
            ns1_on(a)
            ns1_on(b)
            gates.append(LOGate(hb, (a, b)))
        else:
            raise CircuitError(f"gate {g!r} is outside the gate set")

    layout = ModeLayout(len(occupancy), qubit_modes, tuple(records), tuple(occupancy))
    return LOCircuit(layout, tuple(gates), variant, Q.gamma, p)


def mode_matrix(L: LOCircuit) -> np.ndarray:
    """The m x m matrix of L: product of embedded blocks, latest gate leftmost."""
    m = L.layout.m
    with precision(L.prec):
        one, zero = mpc(1), mpc(0)
        U = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                U[i, j] = one if i == j else zero
        for g in L.gates:
            rows = list(g.modes)
            block = np.array(g.block, dtype=object)
            U[rows, :] = block.dot(U[rows, :])
    return U


def extract_V(U, layout: ModeLayout) -> np.ndarray:
    """Rows and columns of U at the initially occupied modes."""
    occ = layout.occupied
    return np.asarray(U, dtype=object)[np.ix_(occ, occ)]


def max_imag(V) -> mpfr:
    return max((abs(v.imag) for v in np.asarray(V, dtype=object).flat), default=mpfr(0))


def entry_bound(V) -> int:
    """Integer M >= every |V_ij| (max absolute row sum, rounded up)."""
    V = np.asarray(V, dtype=object)
    if V.size == 0:
        return 1
    worst = max(sum(abs(v) for v in row) for row in V)
    return max(1, int(gmpy2.ceil(worst * (1 + mpfr(2) ** -40))))


def dual_rail_state(layout: ModeLayout, bits) -> tuple:
    """Occupations encoding qubit basis state ``bits`` with ancillas at their initial values."""
    occ = list(layout.occupancy)
    for (m0, m1), x in zip(layout.qubit_modes, bits):
        occ[m0], occ[m1] = (1, 0) if x else (0, 1)
    return tuple(occ)


def logical_action(L: LOCircuit, U=None) -> np.ndarray:
    """2^k x 2^k postselected action <y|.|x> computed photon by photon (small k only)."""
    U = mode_matrix(L) if U is None else U
    k = len(L.layout.qubit_modes)
    d = 1 << k
    states = [dual_rail_state(L.layout, [(x >> (k - 1 - q)) & 1 for q in range(k)]) for x in range(d)]
    out = np.empty((d, d), dtype=object)
    for y in range(d):
        for x in range(d):
            out[y, x] = transition_amp(U, states[y], states[x], L.prec)
    return out


def format_lo(L: LOCircuit) -> str:
    """Debug JSON dump of a linear-optics circuit."""
    def s(x):
        return str(x)

    doc = {
        "m": L.layout.m,
        "variant": L.variant,
        "gamma": L.gamma,
        "occupancy": list(L.layout.occupancy),
        "qubit_modes": [list(p) for p in L.layout.qubit_modes],
        "ns1": [
            {"target": r.target, "ancillas": list(r.ancillas), "occupations": list(r.occupations)}
            for r in L.layout.ns1
        ],
        "gates": [
            {
                "modes": list(g.modes),
                "re": [[s(v.real) for v in row] for row in g.block],
                "im": [[s(v.imag) for v in row] for row in g.block],
            }
            for g in L.gates
        ],
    }
    return json.dumps(doc, indent=1)
