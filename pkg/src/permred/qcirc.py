"""Qubit circuits over {all 1-qubit gates, CSIGN} and their simulation.

Qubits are 0-based in the API; qubit 0 is the most significant bit of a
basis index. The ``.qc`` text format uses 1-based qubits.

Two Toffoli constructions are provided:

* :func:`toffoli_circuit` -- the exact 6-CSIGN Toffoli (H, B, B^dagger and
  T-phase gates plus a global-phase fix).
* :func:`relative_toffoli` -- a 3-CSIGN Toffoli with real rotations that
  is exact up to a diagonal sign (-1 on |a=1,b=0,t=1>). When computed
  and later uncomputed the sign cancels, and since every gate is real the
  compiled optical matrix is real too. The circuit builders use it by default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .boolcirc import Network, PhasePoly, TruthTable, to_phase_poly
from .errors import BudgetError, CircuitError, ParseError
from .numerics import DEFAULT_PRECISION, precision, tolerance

__all__ = [
    "CSign",
    "DENSE_MAX_K",
    "OneQubit",
    "QCircuit",
    "STATEVECTOR_MAX_K",
    "amp00",
    "b_gate",
    "build_circuit",
    "ccz_circuit",
    "csign_count",
    "dense_unitary",
    "format_qc",
    "hadamard",
    "parse_qc",
    "phase_poly_circuit",
    "relative_toffoli",
    "statevector",
    "toffoli_circuit",
    "uncompute_circuit",
]

DENSE_MAX_K = 12
STATEVECTOR_MAX_K = 24


@dataclass(frozen=True)
class OneQubit:
    """Arbitrary 2x2 gate on ``target``; ``matrix`` is ((m00, m01), (m10, m11))."""

    target: int
    matrix: tuple
    label: str = "U"
    unitary: bool = field(default=True, compare=False)

    def __post_init__(self):
        m = tuple(tuple(row) for row in self.matrix)
        if len(m) != 2 or any(len(r) != 2 for r in m):
            raise CircuitError("1-qubit gate matrix must be 2x2")
        object.__setattr__(self, "matrix", m)
        if self.unitary:
            p = max(max(v.precision) for r in m for v in r)
            err = _unitarity_error(m, p)
            if err > tolerance(p, 40):
                raise CircuitError(f"{self.label} gate is not unitary (error {float(err):.3e})")

    @property
    def precision(self) -> int:
        return max(max(v.precision) for r in self.matrix for v in r)

    def inverse(self) -> "OneQubit":
        (a, b), (c, d) = self.matrix
        with precision(self.precision):
            m = ((a.conjugate(), c.conjugate()), (b.conjugate(), d.conjugate()))
        label = {"H": "H", "Z": "Z", "X": "X", "I": "I"}.get(self.label, "U")
        return OneQubit(self.target, m, label, self.unitary)


@dataclass(frozen=True)
class CSign:
    q1: int
    q2: int

    def __post_init__(self):
        if self.q1 == self.q2:
            raise CircuitError("CSIGN needs two distinct qubits")


def _unitarity_error(m, p):
    with precision(p):
        (a, b), (c, d) = m
        prod = (
            (abs(a) ** 2 + abs(c) ** 2 - 1, a.conjugate() * b + c.conjugate() * d),
            (b.conjugate() * a + d.conjugate() * c, abs(b) ** 2 + abs(d) ** 2 - 1),
        )
        return max(abs(v) for r in prod for v in r)


@dataclass(frozen=True)
class QCircuit:
    """``k`` qubits and a gate list applied first-to-last.

    ``n`` is the variable count of the Boolean function the circuit encodes
    (None for hand-built circuits); ``prec`` the precision of its gate entries.
    """

    k: int
    gates: tuple
    n: int | None = None
    prec: int = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.k < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for g in self.gates:
            qs = (g.target,) if isinstance(g, OneQubit) else (g.q1, g.q2)
            if isinstance(g, OneQubit) or isinstance(g, CSign):
                if any(not 0 <= q < self.k for q in qs):
                    raise CircuitError(f"gate {g} acts outside qubits 0..{self.k - 1}")
            else:
                raise CircuitError(f"gate {g!r} is not in the gate set")

    @property
    def gamma(self) -> int:
        return sum(isinstance(g, CSign) for g in self.gates)

    def inverse(self) -> "QCircuit":
        return QCircuit(self.k, _inverse(self.gates), self.n, self.prec)


def csign_count(Q: QCircuit) -> int:
    return Q.gamma


def _inverse(gates):
    return [g.inverse() if isinstance(g, OneQubit) else g for g in reversed(gates)]


# -- named 1-qubit gates -------------------------------------------------


def _gate(target, entries, p, label, unitary=True):
    with precision(p):
        m = tuple(tuple(mpc(v) for v in row) for row in entries)
    return OneQubit(target, m, label, unitary)


def hadamard(q, p=DEFAULT_PRECISION):
    with precision(p):
        r = 1 / gmpy2.sqrt(mpfr(2))
        return _gate(q, ((r, r), (r, -r)), p, "H")


def b_gate(q, p=DEFAULT_PRECISION):
    """½ [[√(2+√2), i√(2−√2)], [i√(2−√2), √(2+√2)]], i.e. exp(iπ/8 X)."""
    with precision(p):
        s2 = gmpy2.sqrt(mpfr(2))
        c = gmpy2.sqrt(2 + s2) / 2
        s = mpc(0, gmpy2.sqrt(2 - s2) / 2)
        return _gate(q, ((c, s), (s, c)), p, "B")


def z_gate(q, p=DEFAULT_PRECISION):
    return _gate(q, ((1, 0), (0, -1)), p, "Z")


def x_gate(q, p=DEFAULT_PRECISION):
    return _gate(q, ((0, 1), (1, 0)), p, "X")


def phase_gate(q, value, p=DEFAULT_PRECISION):
    """diag(1, value)."""
    return _gate(q, ((1, 0), (0, value)), p, "P")


def t_gate(q, p=DEFAULT_PRECISION, inverse=False):
    with precision(p):
        angle = gmpy2.const_pi() / 4
        v = mpc(gmpy2.cos(angle), -gmpy2.sin(angle) if inverse else gmpy2.sin(angle))
    return phase_gate(q, v, p)


def global_phase(q, value, p=DEFAULT_PRECISION):
    """value * I, applied to one qubit (a global phase of the whole register)."""
    return _gate(q, ((value, 0), (0, value)), p, "U")


def ry(q, numerator, denominator, p=DEFAULT_PRECISION):
    """Real rotation [[cos t/2, -sin t/2], [sin t/2, cos t/2]] with t = π·num/den."""
    with precision(p):
        half = gmpy2.const_pi() * numerator / (2 * denominator)
        c, s = gmpy2.cos(half), gmpy2.sin(half)
        return _gate(q, ((c, -s), (s, c)), p, "U")


def _cnot(c, t, p):
    h = hadamard(t, p)
    return [h, CSign(c, t), h]


# -- Toffoli constructions ------------------------------------------------


def _ccz_gates(a, b, t, p):
    """Exact CCZ on (a, b, t) from 6 CSIGNs, H, B, B^dagger and T phases."""
    H = hadamard(t, p)
    B = b_gate(t, p)
    Bd = B.inverse()
    Hb = hadamard(b, p)
    gates = [H, CSign(b, t), B, CSign(a, t), Bd, CSign(b, t), B, CSign(a, t), H, t_gate(t, p)]
    gates += [t_gate(b, p), Hb, CSign(a, b), b_gate(b, p), t_gate(a, p), CSign(a, b), Hb]
    # B = e^{iπ/8} H T^dagger H and B^dagger = e^{-iπ/8} H T H; net phase e^{iπ/4} to cancel
    with precision(p):
        angle = -gmpy2.const_pi() / 4
        fix = mpc(gmpy2.cos(angle), gmpy2.sin(angle))
    gates.append(global_phase(a, fix, p))
    return gates


def ccz_circuit(p=DEFAULT_PRECISION) -> QCircuit:
    """3-qubit CCZ = diag(1,1,1,1,1,1,1,-1) with exactly 6 CSIGN gates."""
    return QCircuit(3, _ccz_gates(0, 1, 2, p), None, p)


def toffoli_circuit(p=DEFAULT_PRECISION) -> QCircuit:
    """Exact Toffoli |x,y,z> -> |x,y,z xor xy> with exactly 6 CSIGN gates."""
    H = hadamard(2, p)
    return QCircuit(3, [H] + _ccz_gates(0, 1, 2, p) + [H], None, p)


def relative_toffoli(a, b, t, p=DEFAULT_PRECISION) -> list:
    """Toffoli up to a diagonal sign, 3 CSIGNs, all gates real."""
    gates = [ry(t, 1, 4, p)]
    gates += _cnot(b, t, p)
    gates.append(ry(t, 1, 4, p))
    gates += _cnot(a, t, p)
    gates.append(ry(t, -1, 4, p))
    gates += _cnot(b, t, p)
    gates.append(ry(t, -1, 4, p))
    return gates


def _toffoli_gates(a, b, t, p, kind):
    if kind == "relative":
        return relative_toffoli(a, b, t, p)
    if kind == "exact":
        H = hadamard(t, p)
        return [H] + _ccz_gates(a, b, t, p) + [H]
    raise ValueError(f"unknown toffoli kind {kind!r}")


# -- amplitude encodings of Delta_C ----------------------------------------


def phase_poly_circuit(C, p=DEFAULT_PRECISION, cubic="ancilla") -> QCircuit:
    """``H^n · D_C · H^n`` with ``D_C`` lowered monomial by monomial.

    Degree 1 -> Z, degree 2 -> CSIGN. Degree 3 uses ``cubic``:

    * ``"ancilla"`` (default): one shared ancilla qubit, relative Toffoli
      into it, CSIGN with the third variable, relative Toffoli back.
      7 CSIGNs, all gates real.
    * ``"exact"``: the 6-CSIGN :func:`ccz_circuit` on the three variables.
    """
    if not isinstance(C, PhasePoly):
        raise CircuitError(
            f"phase_poly_circuit needs a PhasePoly, got {type(C).__name__}; "
            "use uncompute_circuit for networks"
        )
    n = C.n
    monos = C.sorted_monomials()
    need_anc = cubic == "ancilla" and any(len(m) == 3 for m in monos)
    k = n + 1 if need_anc else n
    anc = n
    F = [hadamard(q, p) for q in range(n)]
    body = []
    for m in monos:
        q = [i - 1 for i in m]
        if len(q) == 1:
            body.append(z_gate(q[0], p))
        elif len(q) == 2:
            body.append(CSign(q[0], q[1]))
        elif cubic == "ancilla":
            tof = relative_toffoli(q[0], q[1], anc, p)
            body += tof + [CSign(anc, q[2])] + _inverse(tof)
        elif cubic == "exact":
            body += _ccz_gates(q[0], q[1], q[2], p)
        else:
            raise ValueError(f"unknown cubic lowering {cubic!r}")
    return QCircuit(k, F + body + F, n, p)


def uncompute_circuit(C, p=DEFAULT_PRECISION, toffoli="relative") -> QCircuit:
    """Compute/phase/uncompute circuit for a :class:`Network`.

    Wire values are tracked classically as parities of qubits plus a
    constant, so XOR and NOT cost nothing. Each AND (and OR, via De Morgan)
    whose operands are independent non-constant parities gets a fresh
    ancilla: its operands are materialised in place with CNOTs and X gates,
    a Toffoli writes the product into the ancilla, and the preparation is
    undone. The output parity is applied as Z gates (and a global sign),
    then the forward sequence is reversed.
    """
    if not isinstance(C, Network):
        raise CircuitError(f"uncompute_circuit needs a Network, got {type(C).__name__}")
    n = C.n
    live = _live_wires(C)
    signal = {f"x{i}": (1 << (i - 1), 0) for i in range(1, n + 1)}
    forward = []
    k = n
    for w in C.wires:
        if w.name not in live:
            continue
        args = [signal[a] for a in w.args]
        if w.gate == "NOT":
            m, c = args[0]
            signal[w.name] = (m, c ^ 1)
        elif w.gate == "XOR":
            (m1, c1), (m2, c2) = args
            signal[w.name] = (m1 ^ m2, c1 ^ c2)
        else:
            if w.gate == "OR":
                args = [(m, c ^ 1) for m, c in args]
            res, gates, k = _lower_and(args[0], args[1], k, p, toffoli)
            forward += gates
            if w.gate == "OR":
                res = (res[0], res[1] ^ 1)
            signal[w.name] = res
    mask, const = signal[C.output]
    phase = [z_gate(q, p) for q in range(k) if mask >> q & 1]
    if const:
        phase.append(global_phase(0, -1, p))
    F = [hadamard(q, p) for q in range(n)]
    return QCircuit(k, F + forward + phase + _inverse(forward) + F, n, p)


def _live_wires(C):
    by_name = {w.name: w for w in C.wires}
    live, stack = set(), [C.output]
    while stack:
        name = stack.pop()
        if name in by_name and name not in live:
            live.add(name)
            stack.extend(by_name[name].args)
    return live


def _lower_and(u, v, k, p, toffoli):
    """Gates writing parity-signal u AND v into a fresh ancilla (or a classical shortcut)."""
    (mu, cu), (mv, cv) = u, v
    if mu == 0:
        return (v if cu else (0, 0)), [], k
    if mv == 0:
        return (u if cv else (0, 0)), [], k
    if mu == mv:
        return (u if cu == cv else (0, 0)), [], k

    prep = []
    pu = (mu & -mu).bit_length() - 1
    for q in _bits(mu):
        if q != pu:
            prep += _cnot(q, pu, p)
    # express v in the coordinates after pu has absorbed the parity of u
    if mv >> pu & 1:
        mv = mu ^ mv ^ (1 << pu)
    pv = next(q for q in _bits(mv) if q != pu)
    for q in _bits(mv):
        if q != pv:
            prep += _cnot(q, pv, p)
    if cu:
        prep.append(x_gate(pu, p))
    if cv:
        prep.append(x_gate(pv, p))
    anc = k
    gates = prep + _toffoli_gates(pu, pv, anc, p, toffoli) + _inverse(prep)
    return (1 << anc, 0), gates, k + 1


def _bits(mask):
    q = 0
    while mask:
        if mask & 1:
            yield q
        mask >>= 1
        q += 1


def build_circuit(C, p=DEFAULT_PRECISION, cubic="ancilla", toffoli="relative") -> QCircuit:
    """Circuit with <0|Q|0> = Delta_C / 2^n for any representation.

    Truth tables are converted to their algebraic normal form and must have
    degree at most 3.
    """
    if isinstance(C, Network):
        return uncompute_circuit(C, p, toffoli)
    if isinstance(C, TruthTable):
        C = to_phase_poly(C)
    return phase_poly_circuit(C, p, cubic)


# -- simulation -------------------------------------------------------------


def _apply(state, gate, k):
    if isinstance(gate, OneQubit):
        q = gate.target
        s = state.reshape(1 << q, 2, 1 << (k - q - 1), -1)
        a0 = s[:, 0].copy()
        a1 = s[:, 1].copy()
        (m00, m01), (m10, m11) = gate.matrix
        s[:, 0] = a0 * m00 + a1 * m01
        s[:, 1] = a0 * m10 + a1 * m11
    else:
        q1, q2 = sorted((gate.q1, gate.q2))
        s = state.reshape(1 << q1, 2, 1 << (q2 - q1 - 1), 2, 1 << (k - q2 - 1), -1)
        s[:, 1, :, 1] = -s[:, 1, :, 1]


def _run(Q, state):
    with precision(Q.prec):
        for g in Q.gates:
            _apply(state, g, Q.k)
    return state


def statevector(Q: QCircuit, initial=0) -> np.ndarray:
    """Final state (object array of mpc) starting from basis state ``initial``."""
    if Q.k > STATEVECTOR_MAX_K:
        raise BudgetError(f"statevector simulation refuses k={Q.k} > {STATEVECTOR_MAX_K}")
    state = np.empty((1 << Q.k, 1), dtype=object)
    with precision(Q.prec):
        state[:, 0] = [mpc(0)] * (1 << Q.k)
        state[initial, 0] = mpc(1)
    return _run(Q, state)[:, 0]


def amp00(Q: QCircuit) -> mpc:
    """<0...0|Q|0...0>."""
    return statevector(Q)[0]


def dense_unitary(Q: QCircuit) -> np.ndarray:
    """Full 2^k x 2^k matrix of Q (object array of mpc), k <= 12."""
    if Q.k > DENSE_MAX_K:
        raise BudgetError(f"dense_unitary refuses k={Q.k} > {DENSE_MAX_K}")
    d = 1 << Q.k
    state = np.empty((d, d), dtype=object)
    with precision(Q.prec):
        zero, one = mpc(0), mpc(1)
        for i in range(d):
            for j in range(d):
                state[i, j] = one if i == j else zero
    return _run(Q, state)


# -- .qc text format ---------------------------------------------------------


def parse_qc(text: str, p=DEFAULT_PRECISION) -> QCircuit:
    """Parse the ``.qc`` format (1-based qubits)."""
    lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty circuit file")
    lineno, ln = lines[0]
    parts = ln.split()
    if len(parts) != 2 or parts[0] != "qubits":
        raise ParseError(f"expected 'qubits <k>', got {ln!r}", lineno)
    try:
        k = int(parts[1])
    except ValueError:
        raise ParseError(f"bad qubit count {parts[1]!r}", lineno) from None
    if k < 1:
        raise ParseError("qubit count must be positive", lineno)

    def qubit(tok, lineno):
        try:
            q = int(tok) - 1
        except ValueError:
            raise ParseError(f"bad qubit index {tok!r}", lineno) from None
        if not 0 <= q < k:
            raise ParseError(f"qubit {tok} outside 1..{k}", lineno)
        return q

    def num(tok, lineno):
        try:
            with precision(p):
                return mpfr(tok)
        except ValueError:
            raise ParseError(f"bad number {tok!r}", lineno) from None

    simple = {"H": hadamard, "B": b_gate, "Z": z_gate, "X": x_gate}
    nargs = {"H": 1, "B": 1, "Z": 1, "X": 1, "P": 3, "U": 9, "CSIGN": 2}
    gates = []
    for lineno, ln in lines[1:]:
        parts = ln.split()
        op = parts[0].upper()
        if op not in nargs:
            raise ParseError(f"unknown gate {parts[0]!r}", lineno)
        if len(parts) - 1 != nargs[op]:
            raise ParseError(f"{op} takes {nargs[op]} argument(s)", lineno)
        try:
            if op in simple:
                gates.append(simple[op](qubit(parts[1], lineno), p))
            elif op == "P":
                with precision(p):
                    v = mpc(num(parts[2], lineno), num(parts[3], lineno))
                gates.append(phase_gate(qubit(parts[1], lineno), v, p))
            elif op == "U":
                vals = [num(t, lineno) for t in parts[2:]]
                with precision(p):
                    e = [mpc(vals[i], vals[i + 1]) for i in range(0, 8, 2)]
                gates.append(_gate(qubit(parts[1], lineno), ((e[0], e[1]), (e[2], e[3])), p, "U"))
            else:
                gates.append(CSign(qubit(parts[1], lineno), qubit(parts[2], lineno)))
        except CircuitError as exc:
            raise ParseError(str(exc), lineno) from None
    return QCircuit(k, gates, None, p)


def format_qc(Q: QCircuit) -> str:
    out = [f"qubits {Q.k}"]
    for g in Q.gates:
        if isinstance(g, CSign):
            out.append(f"CSIGN {g.q1 + 1} {g.q2 + 1}")
        elif g.label in ("H", "B", "Z", "X"):
            out.append(f"{g.label} {g.target + 1}")
        elif g.label == "P":
            v = g.matrix[1][1]
            out.append(f"P {g.target + 1} {_num(v.real)} {_num(v.imag)}")
        else:
            vals = [x for row in g.matrix for v in row for x in (v.real, v.imag)]
            out.append(f"U {g.target + 1} " + " ".join(_num(x) for x in vals))
    return "\n".join(out) + "\n"


def _num(x):
    digits = int(math.ceil(x.precision * math.log10(2))) + 2
    return format(x, f".{digits}g")
