"""
Signed counts as circuit amplitudes
===================================

A Boolean function C on n bits has the signed count Delta_C = sum_x C(x).
Sandwiching the diagonal sign oracle of C between two layers of Hadamards
gives a circuit whose all-zeros amplitude is exactly Delta_C / 2^n.
"""

from permred import build_circuit, corpus, delta, parse_boolfunc
from permred.numerics import precision
from permred.qcirc import amp00

###############################################################################
# A phase polynomial: C(x) = (-1)^(x1 x2). One quadratic term costs one CSIGN.
C = parse_boolfunc("n 2\nrepr phasepoly\nterm 1 2\n")
Q = build_circuit(C)
with precision(Q.prec):
    print("delta", delta(C), " amp00 * 2^n", complex(amp00(Q) * 4))
print("qubits", Q.k, " CSIGN count", Q.gamma)

###############################################################################
# A cubic term goes through a borrowed ancilla: a real relative-phase Toffoli
# writes x1 x2 into it, a CSIGN with x3 applies the sign, and the Toffoli is
# undone. Every gate is real, which keeps the optical matrix real later on.
C = corpus()["ccz"]
Q = build_circuit(C)
with precision(Q.prec):
    print("ccz: delta", delta(C), " amp00 * 8", complex(amp00(Q) * 8), " k", Q.k, " gamma", Q.gamma)

###############################################################################
# Networks use compute / phase / uncompute. XOR and NOT are tracked as
# parities and cost nothing; each AND needs one ancilla and two Toffolis.
for name in ("network_and", "network_or", "network_linear"):
    C = corpus()[name]
    Q = build_circuit(C)
    with precision(Q.prec):
        a = amp00(Q) * 2**C.n
    print(f"{name:15s} delta {delta(C):3d}  amp00*2^n {float(a.real):+.6f}  k {Q.k}  gamma {Q.gamma}")
