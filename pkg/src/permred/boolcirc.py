"""Boolean functions ``C: {0,1}^n -> {-1,+1}`` and the brute-force count.

Three representations are supported:

* :class:`TruthTable` -- the 2**n signs, indexed with x1 as the most
  significant bit.
* :class:`PhasePoly` -- ``C(x) = (-1)^(XOR of monomials)``, each monomial a
  product of 1 to 3 distinct variables.
* :class:`Network` -- straight-line AND/OR/XOR/NOT wires over the inputs and
  earlier wires, ``C(x) = (-1)^(output wire)``.

``delta(C)`` is the signed count ``sum_x C(x)``; it is the oracle every
other stage of the reduction is checked against.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import BudgetError, ParseError

__all__ = [
    "BoolFunc",
    "DELTA_MAX_N",
    "Network",
    "PaddedFunc",
    "PhasePoly",
    "TruthTable",
    "Wire",
    "corpus",
    "delta",
    "format_boolfunc",
    "pad",
    "parse_boolfunc",
    "source_digest",
    "to_phase_poly",
]

DELTA_MAX_N = 24
_CHUNK_BITS = 20
GATES = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1}


class BoolFunc:
    """Common interface: ``n`` and a vectorised sign evaluator."""

    n: int

    def signs(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """int8 array of C(x) in {-1,+1} for assignment indices ``start..stop-1``."""
        stop = (1 << self.n) if stop is None else stop
        idx = np.arange(start, stop, dtype=np.int64)
        bits = self._parity(idx)
        return (1 - 2 * bits.astype(np.int8)).astype(np.int8)

    def _parity(self, idx: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _var(self, idx: np.ndarray, i: int) -> np.ndarray:
        """Bit of variable x_i (1-based) across the assignment indices."""
        return ((idx >> (self.n - i)) & 1).astype(bool)

    def __call__(self, x) -> int:
        """C(x) for an assignment given as an index or a bit sequence (x1 first)."""
        if not isinstance(x, (int, np.integer)):
            bits = list(x)
            if len(bits) != self.n:
                raise ValueError(f"expected {self.n} bits")
            x = int("".join(str(int(b)) for b in bits) or "0", 2)
        return int(self.signs(int(x), int(x) + 1)[0])

    def to_truth_table(self) -> "TruthTable":
        _check_size(self.n)
        return TruthTable(self.n, tuple(int(v) for v in self.signs()))


def _check_size(n):
    if n > DELTA_MAX_N:
        raise BudgetError(f"brute force over 2^{n} assignments refused (n > {DELTA_MAX_N})")


def _check_n(n):
    if not 1 <= n <= DELTA_MAX_N:
        raise ValueError(f"variable count must be in 1..{DELTA_MAX_N}, got {n}")


@dataclass(frozen=True)
class TruthTable(BoolFunc):
    n: int
    values: tuple

    def __post_init__(self):
        _check_n(self.n)
        if len(self.values) != 1 << self.n:
            raise ValueError(f"truth table needs {1 << self.n} entries, got {len(self.values)}")
        if any(v not in (1, -1) for v in self.values):
            raise ValueError("truth table entries must be +1 or -1")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def _parity(self, idx):
        table = np.array(self.values, dtype=np.int8)
        return table[idx] < 0


@dataclass(frozen=True)
class PhasePoly(BoolFunc):
    n: int
    monomials: frozenset

    def __post_init__(self):
        _check_n(self.n)
        monos = frozenset(frozenset(m) for m in self.monomials)
        for m in monos:
            if not 1 <= len(m) <= 3:
                raise ValueError(f"monomial {sorted(m)} must have degree 1..3")
            if any(not 1 <= i <= self.n for i in m):
                raise ValueError(f"monomial {sorted(m)} references a variable outside 1..{self.n}")
        object.__setattr__(self, "monomials", monos)

    def sorted_monomials(self) -> list[tuple[int, ...]]:
        """Monomials in a canonical order: by degree, then lexicographically."""
        return sorted((tuple(sorted(m)) for m in self.monomials), key=lambda t: (len(t), t))

    def _parity(self, idx):
        acc = np.zeros(idx.shape, dtype=bool)
        for m in self.monomials:
            term = np.ones(idx.shape, dtype=bool)
            for i in m:
                term &= self._var(idx, i)
            acc ^= term
        return acc


@dataclass(frozen=True)
class Wire:
    name: str
    gate: str
    args: tuple


@dataclass(frozen=True)
class Network(BoolFunc):
    n: int
    wires: tuple
    output: str

    def __post_init__(self):
        _check_n(self.n)
        wires = tuple(w if isinstance(w, Wire) else Wire(w[0], w[1], tuple(w[2])) for w in self.wires)
        object.__setattr__(self, "wires", wires)
        known = {f"x{i}" for i in range(1, self.n + 1)}
        for w in wires:
            if w.gate not in GATES:
                raise ValueError(f"unknown gate {w.gate!r}")
            if len(w.args) != GATES[w.gate]:
                raise ValueError(f"{w.gate} takes {GATES[w.gate]} argument(s)")
            if w.name in known:
                raise ValueError(f"wire name {w.name!r} already defined")
            for a in w.args:
                if a not in known:
                    raise ValueError(f"wire {w.name!r} references undefined {a!r}")
            known.add(w.name)
        if self.output not in known:
            raise ValueError(f"output {self.output!r} is not defined")

    def _parity(self, idx):
        vals = {f"x{i}": self._var(idx, i) for i in range(1, self.n + 1)}
        for w in self.wires:
            a = [vals[x] for x in w.args]
            if w.gate == "AND":
                v = a[0] & a[1]
            elif w.gate == "OR":
                # De Morgan keeps a single AND path
                v = ~(~a[0] & ~a[1])
            elif w.gate == "XOR":
                v = a[0] ^ a[1]
            else:
                v = ~a[0]
            vals[w.name] = v
        return vals[self.output]


def delta(C) -> int:
    """Signed count ``sum_x C(x)`` by enumeration (n <= 24).

    Assignments are processed in fixed chunks of 2**20 in ascending order.
    Also accepts a :class:`PaddedFunc`.
    """
    if isinstance(C, PaddedFunc):
        return C.delta
    _check_size(C.n)
    total = 0
    size = 1 << C.n
    step = 1 << _CHUNK_BITS
    for start in range(0, size, step):
        total += int(C.signs(start, min(size, start + step)).sum(dtype=np.int64))
    return total


@dataclass(frozen=True)
class PaddedFunc:
    """``C[k]``: C with |k| extra assignments of sign ``sgn(k)``.

    The extra assignments are never materialised; only the count changes.
    """

    base: BoolFunc
    k: int

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def delta(self) -> int:
        return delta(self.base) + self.k


def pad(C: BoolFunc, k: int) -> PaddedFunc:
    if isinstance(C, PaddedFunc):
        return PaddedFunc(C.base, C.k + int(k))
    return PaddedFunc(C, int(k))


_WIRE_RE = re.compile(r"^wire\s+(\S+)\s*=\s*(\S+)\s+(.*)$")


def parse_boolfunc(text: str) -> BoolFunc:
    """Parse the line-based ``.bf`` format.

    ::

        # comment
        n 3
        repr phasepoly
        term 1 2
        term 1 2 3
    """
    lines = []
    for i, raw in enumerate(text.splitlines(), start=1):
        ln = raw.split("#", 1)[0].strip()
        if ln:
            lines.append((i, ln))
    if len(lines) < 2:
        raise ParseError("expected 'n <int>' and 'repr <kind>' header lines", lines[-1][0] if lines else None)

    lineno, ln = lines[0]
    parts = ln.split()
    if len(parts) != 2 or parts[0] != "n":
        raise ParseError(f"expected 'n <int>', got {ln!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad variable count {parts[1]!r}", lineno) from None
    if not 1 <= n <= DELTA_MAX_N:
        raise ParseError(f"variable count must be in 1..{DELTA_MAX_N}", lineno)

    lineno, ln = lines[1]
    parts = ln.split()
    if len(parts) != 2 or parts[0] != "repr" or parts[1] not in ("table", "phasepoly", "network"):
        raise ParseError(f"expected 'repr table|phasepoly|network', got {ln!r}", lineno)
    kind = parts[1]
    body = lines[2:]

    if kind == "table":
        if len(body) != 1:
            raise ParseError("table representation takes exactly one line of signs", body[1][0] if len(body) > 1 else lineno)
        lineno, ln = body[0]
        chars = ln.replace(" ", "").replace("−", "-")
        if len(chars) != 1 << n:
            raise ParseError(f"table length {len(chars)} != 2^{n} = {1 << n}", lineno)
        if set(chars) - {"+", "-"}:
            raise ParseError("table characters must be '+' or '-'", lineno)
        return TruthTable(n, tuple(1 if c == "+" else -1 for c in chars))

    if kind == "phasepoly":
        monos: set[frozenset] = set()
        for lineno, ln in body:
            parts = ln.split()
            if parts[0] != "term":
                raise ParseError(f"expected 'term <i> [<j> [<k>]]', got {ln!r}", lineno)
            if not 2 <= len(parts) <= 4:
                raise ParseError("monomial degree must be 1..3", lineno)
            try:
                idx = frozenset(int(t) for t in parts[1:])
            except ValueError:
                raise ParseError(f"bad variable index in {ln!r}", lineno) from None
            if any(not 1 <= i <= n for i in idx):
                raise ParseError(f"variable index out of range 1..{n}", lineno)
            # repeated monomials cancel under XOR
            monos ^= {idx}
        return PhasePoly(n, frozenset(monos))

    wires = []
    known = {f"x{i}" for i in range(1, n + 1)}
    output = None
    for lineno, ln in body:
        if output is not None:
            raise ParseError("nothing may follow the 'output' line", lineno)
        if ln.startswith("output"):
            parts = ln.split()
            if len(parts) != 2:
                raise ParseError("expected 'output <name>'", lineno)
            if parts[1] not in known:
                raise ParseError(f"output {parts[1]!r} is not defined", lineno)
            output = parts[1]
            continue
        m = _WIRE_RE.match(ln)
        if not m:
            raise ParseError(f"expected 'wire <name> = <GATE> <args>', got {ln!r}", lineno)
        name, gate, rest = m.group(1), m.group(2).upper(), m.group(3).split()
        if gate not in GATES:
            raise ParseError(f"unknown gate {gate!r}", lineno)
        if len(rest) != GATES[gate]:
            raise ParseError(f"{gate} takes {GATES[gate]} argument(s)", lineno)
        if name in known:
            raise ParseError(f"wire {name!r} redefined", lineno)
        for a in rest:
            if a not in known:
                raise ParseError(f"reference to undefined or later wire {a!r}", lineno)
        known.add(name)
        wires.append(Wire(name, gate, tuple(rest)))
    if output is None:
        raise ParseError("network has no 'output' line", lines[-1][0])
    return Network(n, tuple(wires), output)


def format_boolfunc(C: BoolFunc) -> str:
    """Inverse of :func:`parse_boolfunc`."""
    out = [f"n {C.n}"]
    if isinstance(C, TruthTable):
        out += ["repr table", "".join("+" if v > 0 else "-" for v in C.values)]
    elif isinstance(C, PhasePoly):
        out.append("repr phasepoly")
        out += ["term " + " ".join(map(str, m)) for m in C.sorted_monomials()]
    elif isinstance(C, Network):
        out.append("repr network")
        out += [f"wire {w.name} = {w.gate} {' '.join(w.args)}" for w in C.wires]
        out.append(f"output {C.output}")
    else:
        raise TypeError(f"cannot format {type(C).__name__}")
    return "\n".join(out) + "\n"


def source_digest(C: BoolFunc) -> str:
    """SHA-256 of the canonical ``.bf`` text of ``C``."""
    return hashlib.sha256(format_boolfunc(C).encode("utf-8")).hexdigest()


def to_phase_poly(C: BoolFunc) -> PhasePoly:
    """Algebraic normal form of the sign bit of ``C`` as a :class:`PhasePoly`.

    Raises ValueError if a monomial of degree above 3 (or a constant term)
    appears, since those have no PhasePoly encoding.
    """
    if isinstance(C, PhasePoly):
        return C
    n = C.n
    _check_size(n)
    bits = (C.signs() < 0).astype(np.uint8)
    # Moebius transform over GF(2); index bit (n - i) is variable x_i
    for s in range(n):
        step = 1 << s
        view = bits.reshape(-1, 2, step)
        view[:, 1, :] ^= view[:, 0, :]
    monos = set()
    for idx in np.flatnonzero(bits):
        vars_ = frozenset(n - s for s in range(n) if idx >> s & 1)
        if not vars_:
            raise ValueError("C(0...0) = -1 needs a constant term; use a network instead")
        if len(vars_) > 3:
            raise ValueError(f"sign function has degree {len(vars_)} > 3; use a network instead")
        monos.add(vars_)
    return PhasePoly(n, frozenset(monos))


def corpus() -> dict[str, BoolFunc]:
    """Bundled example functions, keyed by file stem."""
    root = resources.files("permred") / "corpus"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".bf"):
            out[entry.name[:-3]] = parse_boolfunc(entry.read_text(encoding="utf-8"))
    return out
