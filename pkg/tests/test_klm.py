import json

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpfr

from permred.boolcirc import corpus, delta
from permred.klm import (
    compile_circuit,
    dual_rail_state,
    entry_bound,
    extract_V,
    format_lo,
    logical_action,
    max_imag,
    mode_matrix,
    ns1_block,
    ns1_lambdas,
)
from permred.numerics import precision, tolerance
from permred.permanent import per_ryser
from permred.qcirc import CSign, QCircuit, amp00, build_circuit, hadamard

P = 128


def dev(values, targets):
    with precision(P):
        return max(abs(v - t) for v, t in zip(values, targets))


def test_ns1_amplitudes():
    assert dev(ns1_lambdas("w", P), (0.5, 0.5, -0.5)) <= tolerance(P, 40)
    assert dev(ns1_lambdas("y", P), (1, 1, -1)) <= tolerance(P, 40)


def test_w_block_is_unitary_and_y_is_not():
    W = np.array(ns1_block("w", P), dtype=object)
    Y = np.array(ns1_block("y", P), dtype=object)
    with precision(P):
        WW = W.dot(W.T)  # W is real symmetric
        YY = Y.dot(Y.T)
    assert dev(WW.flat, np.eye(3).flat) <= tolerance(P, 40)
    assert dev(YY.flat, np.eye(2).flat) > 1


@pytest.mark.parametrize("variant, scale", [("w", 0.25), ("y", 1)])
def test_csign_gadget_action(variant, scale):
    L = compile_circuit(QCircuit(2, [CSign(0, 1)], None, P), variant)
    act = logical_action(L)
    assert dev(act.flat, (scale * np.diag([1, 1, 1, -1])).flat) <= tolerance(P, 40)


def test_layout_sizes():
    Q = QCircuit(3, [CSign(0, 1), CSign(1, 2), hadamard(0, P)], None, P)
    Lw = compile_circuit(Q, "w")
    Ly = compile_circuit(Q, "y")
    assert Lw.layout.m == 2 * 3 + 4 * 2
    assert Ly.layout.m == 2 * 3 + 2 * 2
    assert Lw.layout.photons == Ly.layout.photons == 3 + 2 * 2
    assert Lw.layout.occupancy[:6] == (0, 1, 0, 1, 0, 1)
    assert dual_rail_state(Lw.layout, (1, 0, 1))[:6] == (1, 0, 0, 1, 1, 0)


def test_one_qubit_gate_becomes_its_block():
    Q = QCircuit(1, [hadamard(0, P)], None, P)
    L = compile_circuit(Q, "w")
    act = logical_action(L)
    with precision(P):
        r = 1 / gmpy2.sqrt(mpfr(2))
        want = [r, r, r, -r]
    assert dev(act.flat, want) <= tolerance(P, 40)


@pytest.mark.parametrize("name", ["cz", "chain", "neg4", "network_and"])
@pytest.mark.parametrize("variant", ["w", "y"])
def test_permanent_of_V_matches_amplitude(name, variant):
    Q = build_circuit(corpus()[name], P)
    L = compile_circuit(Q, variant)
    V = extract_V(mode_matrix(L), L.layout)
    assert V.shape == (Q.k + 2 * Q.gamma,) * 2
    assert max_imag(V) <= tolerance(P, 44)
    with precision(P):
        want = amp00(Q) / 4**Q.gamma if variant == "w" else amp00(Q)
        assert abs(per_ryser(V) - want) <= tolerance(P, 50)


def test_small_circuit_end_to_end_by_photon_simulation():
    C = corpus()["cz"]
    Q = build_circuit(C, P)
    L = compile_circuit(Q, "w")
    act = logical_action(L)
    with precision(P):
        assert abs(act[0, 0] * 4**Q.gamma * 4 - delta(C)) <= tolerance(P, 40)


def test_entry_bound():
    with precision(P):
        V = np.array([[mpfr(0.5), mpfr(-2)], [mpfr(1), mpfr(1)]], dtype=object)
    assert entry_bound(V) == 3


def test_exact_ccz_gives_complex_V():
    Q = build_circuit(corpus()["ccz"], P, cubic="exact")
    L = compile_circuit(Q, "w")
    V = extract_V(mode_matrix(L), L.layout)
    assert max_imag(V) > 0.1


def test_lo_dump_is_json():
    L = compile_circuit(QCircuit(2, [CSign(0, 1)], None, P), "w")
    doc = json.loads(format_lo(L))
    assert doc["m"] == 8 and len(doc["gates"]) == 4 and doc["occupancy"] == [0, 1, 0, 1, 0, 1, 0, 1]


def test_unknown_variant():
    with pytest.raises(ValueError):
        compile_circuit(QCircuit(1, [], None, P), "z")
