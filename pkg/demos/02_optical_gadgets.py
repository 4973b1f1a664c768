"""
Postselected gadgets in dual rail
=================================

The nonlinear sign gate NS1 flips the sign of the two-photon component of a
mode. It is built from a small linear-optics block plus ancilla modes whose
photon counts are postselected. Two versions are available: the unitary W
block (success amplitude 1/2) and the non-unitary Y block (amplitude 1).
"""

import numpy as np

from permred import corpus
from permred.klm import compile_circuit, extract_V, logical_action, max_imag, mode_matrix, ns1_lambdas
from permred.numerics import precision
from permred.qcirc import CSign, QCircuit, build_circuit

###############################################################################
# Amplitudes on 0, 1 and 2 photons in the target mode, by photon counting.
for variant in ("w", "y"):
    lam = ns1_lambdas(variant)
    print(variant, [float(x.real) for x in lam])

###############################################################################
# A CSIGN is two NS1 gadgets between beam splitters. Its postselected action
# on the four dual-rail basis states is diagonal.
for variant in ("w", "y"):
    L = compile_circuit(QCircuit(2, [CSign(0, 1)]), variant)
    act = logical_action(L)
    print(variant, "modes", L.layout.m, "diag", np.round([float(act[i, i].real) for i in range(4)], 6))

###############################################################################
# For a whole circuit, the amplitude of interest is the permanent of V: the
# mode matrix restricted to the initially occupied modes. With only real
# gates V has no imaginary part at all.
C = corpus()["network_and"]
Q = build_circuit(C)
for variant in ("w", "y"):
    L = compile_circuit(Q, variant)
    V = extract_V(mode_matrix(L), L.layout)
    with precision(L.prec):
        print(variant, "V is", V.shape, " max |Im V|", float(max_imag(V)))
