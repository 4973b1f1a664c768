"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import contextlib
import functools
import io
import itertools
import math
import random
import time
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from permred.boolcirc import PhasePoly, TruthTable, corpus, delta
from permred.cli import main as cli_main
from permred.fock import check_homomorphism, expand_submatrix, random_matrix, random_unitary, transition_amp
from permred.klm import compile_circuit, logical_action, max_imag, ns1_lambdas
from permred.numerics import precision, round_nearest_int, tolerance
from permred.permanent import per_naive, per_ryser
from permred.qcirc import CSign, QCircuit, amp00, csign_count, dense_unitary, toffoli_circuit
from permred.reduce import recover, recovery_quotient, reduce, reduce_trace
from permred.signsearch import SignOracle, call_bound, determine_delta

P = 128
N_LIMIT = 22
VARIANTS = ("w", "y")


@functools.lru_cache(maxsize=None)
def pipeline(name, variant):
    """Reduction of a corpus function plus the exact permanent of its A."""
    R = reduce_trace(corpus()[name], variant)
    per_A = per_ryser(R.instance.A) if R.instance.N <= N_LIMIT else None
    return R, per_A


def verifiable():
    return [name for name in sorted(corpus()) if pipeline(name, "w")[0].instance.N <= N_LIMIT]


def fmt_log2(x):
    return "0" if x == 0 else f"2^{float(gmpy2.log2(x)):.1f}"


def test_criterion_01_round_trip(acceptance_report):
    start = time.perf_counter()
    funcs = corpus()
    names = verifiable()
    failures = []
    gammas = set()
    slack = Fraction(0)
    for name in names:
        C = funcs[name]
        want = delta(C)
        for v in VARIANTS:
            R, per_A = pipeline(name, v)
            q = recovery_quotient(R.instance, per_A)
            slack = max(slack, abs(q - want))
            if round_nearest_int(q) != want:
                failures.append(f"{name}/{v}")
        gammas.add(R.Q.gamma)
    # a one-AND network checked through the amplitude stage as well
    R, _ = pipeline("network_and", "w")
    with precision(R.p):
        amp_ok = round_nearest_int((amp00(R.Q) * 4).real) == delta(funcs["network_and"])
    polys = [n for n in names if isinstance(funcs[n], PhasePoly)]
    elapsed = time.perf_counter() - start
    ok = (
        not failures
        and amp_ok
        and len(names) >= 12
        and {0, 1, 2, 6, 7} <= gammas
        and all(funcs[n].n in (1, 2, 3) for n in polys)
        and slack <= Fraction(1, 4)
        and elapsed < 60
    )
    acceptance_report(
        1,
        ok,
        f"{len(names)} functions x 2 variants exact, gammas {sorted(gammas)}, "
        f"max |quotient - delta| {float(slack):.2e}, {elapsed:.1f}s"
        + (f", failures {failures}" if failures else ""),
    )
    assert ok


def test_criterion_02_amplitude_relation(acceptance_report):
    worst_margin = None
    bad = []
    for name in verifiable():
        for v in VARIANTS:
            R, _ = pipeline(name, v)
            with precision(R.p):
                a = amp00(R.Q)
                want = a / 4**R.Q.gamma if v == "w" else a
                err = abs(per_ryser(R.V) - want)
            tol = tolerance(R.p, 50)
            if err > tol:
                bad.append(f"{name}/{v}")
            margin = float(gmpy2.log2(err / tol)) if err else -math.inf
            worst_margin = margin if worst_margin is None else max(worst_margin, margin)
    ok = not bad
    acceptance_report(2, ok, f"worst error/tolerance ratio 2^{worst_margin:.1f}" + (f", failures {bad}" if bad else ""))
    assert ok


def test_criterion_03_gadget_constants(acceptance_report):
    tol = tolerance(P, 40)
    with precision(P):
        dw = max(abs(x - t) for x, t in zip(ns1_lambdas("w", P), (0.5, 0.5, -0.5)))
        dy = max(abs(x - t) for x, t in zip(ns1_lambdas("y", P), (1, 1, -1)))
    act = logical_action(compile_circuit(QCircuit(2, [CSign(0, 1)], None, P), "w"))
    target = np.diag([0.25, 0.25, 0.25, -0.25])
    with precision(P):
        dc = max(abs(a - t) for a, t in zip(act.flat, target.flat))
    ok = max(dw, dy, dc) <= tol
    acceptance_report(3, ok, f"NS1-W dev {fmt_log2(dw)}, NS1-Y dev {fmt_log2(dy)}, CSIGN gadget dev {fmt_log2(dc)}")
    assert ok


def test_criterion_04_toffoli(acceptance_report):
    Q = toffoli_circuit(P)
    T = np.eye(8)
    T[[6, 7]] = T[[7, 6]]
    with precision(P):
        dev = max(abs(a - t) for a, t in zip(dense_unitary(Q).flat, T.flat))
    ok = dev <= tolerance(P, 40) and csign_count(Q) == 6
    acceptance_report(4, ok, f"{csign_count(Q)} CSIGNs, max deviation {fmt_log2(dev)}")
    assert ok


def test_criterion_05_homomorphism(acceptance_report):
    rng = random.Random(2024)
    worst = mpfr(0)
    non_unitary = 0
    for t in range(100):
        m, n = rng.randint(1, 4), rng.randint(1, 3)
        if t % 2:
            U, V = random_matrix(m, rng, P), random_matrix(m, rng, P)
            non_unitary += 1
        else:
            U, V = random_unitary(m, rng, P), random_unitary(m, rng, P)
        worst = max(worst, check_homomorphism(U, V, n, P))
    ok = worst <= tolerance(P, 40)
    acceptance_report(5, ok, f"100 pairs ({non_unitary} non-unitary), max deviation {fmt_log2(worst)}")
    assert ok


def test_criterion_06_worked_example(acceptance_report):
    with precision(P):
        U = np.array([[mpc(1), mpc(0)], [mpc(0), mpc(-1)]], dtype=object)
    sub = expand_submatrix(U, (2, 1), (2, 1))
    shown = [[1, 1, 0], [1, 1, 0], [0, 0, -1]]
    amp = transition_amp(U, (2, 1), (2, 1), P)
    exact_sub = all(v == w for row, wrow in zip(sub, shown) for v, w in zip(row, wrow))
    with precision(P):
        ok = exact_sub and abs(amp + 1) <= tolerance(P, 40)
    acceptance_report(6, ok, f"U_ST matches displayed matrix: {exact_sub}, amplitude {complex(amp)}")
    assert ok


def test_criterion_07_permanent_engines(acceptance_report):
    rng = random.Random(7)
    mismatches = 0
    for _ in range(500):
        n = rng.randint(1, 7)
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        mismatches += per_ryser(A) != per_naive(A)
    ident = all(per_ryser(np.eye(n, dtype=int)) == 1 for n in range(1, 11))
    ones = all(per_ryser(np.ones((n, n), dtype=int)) == math.factorial(n) for n in range(1, 11))
    ones_naive = all(per_naive(np.ones((n, n), dtype=int)) == math.factorial(n) for n in range(1, 9))
    ok = mismatches == 0 and ident and ones and ones_naive
    acceptance_report(7, ok, f"500 random matrices, {mismatches} mismatches; identity ok {ident}; all-ones ok {ones and ones_naive}")
    assert ok


def test_criterion_08_unitary_permanent_bound(acceptance_report):
    rng = random.Random(8)
    worst = mpfr(0)
    for t in range(100):
        U = random_unitary(2 + t % 6, rng, P)
        with precision(P):
            worst = max(worst, abs(per_ryser(U)))
    ok = worst <= 1 + tolerance(P, 40)
    acceptance_report(8, ok, f"100 unitaries of size 2..7, max |Per| {float(worst):.6f}")
    assert ok


def test_criterion_09_truncation_robustness(acceptance_report):
    funcs = corpus()
    changed = trials = 0
    failures = []
    for name in verifiable():
        want = delta(funcs[name])
        for v in VARIANTS:
            base = pipeline(name, v)[0].instance
            for seed in range(10):
                inst = reduce(funcs[name], v, perturb=random.Random(f"{name}/{v}/{seed}"))
                trials += 1
                changed += inst.A != base.A
                if recover(inst) != want:
                    failures.append(f"{name}/{v}/{seed}")
    ok = not failures
    acceptance_report(9, ok, f"{trials} perturbed instances ({changed} with a changed A), all recover delta" if ok else f"failures {failures}")
    assert ok


def generated_functions():
    """Every truth table on up to 3 variables, every weight on 4..8 variables, and random phase polynomials."""
    out = []
    for n in (1, 2, 3):
        for values in itertools.product((1, -1), repeat=1 << n):
            out.append(TruthTable(n, values))
    rng = random.Random(10)
    for n in range(4, 9):
        size = 1 << n
        for minus in range(size + 1):
            values = [1] * size
            for i in rng.sample(range(size), minus):
                values[i] = -1
            out.append(TruthTable(n, tuple(values)))
        for _ in range(20):
            monos = set()
            for _ in range(rng.randint(0, 6)):
                monos ^= {frozenset(rng.sample(range(1, n + 1), rng.randint(1, 3)))}
            out.append(PhasePoly(n, frozenset(monos)))
    return out


def test_criterion_10_sign_search(acceptance_report):
    gen = generated_functions()
    brute_bad = 0
    over_budget = 0
    for C in gen:
        oracle = SignOracle("brute")
        res = determine_delta(oracle, C)
        brute_bad += res.delta != delta(C)
        over_budget += oracle.calls > call_bound(res.delta)
    funcs = corpus()
    perm_bad = []
    for name in verifiable():
        for v in VARIANTS:
            oracle = SignOracle("permanent", v)
            res = determine_delta(oracle, funcs[name])
            if res.delta != delta(funcs[name]) or oracle.calls > call_bound(res.delta):
                perm_bad.append(f"{name}/{v}")
    ok = brute_bad == 0 and over_budget == 0 and not perm_bad
    acceptance_report(
        10,
        ok,
        f"{len(gen)} generated functions (brute), {len(verifiable())} corpus functions x 2 variants (permanent), "
        f"{brute_bad + len(perm_bad)} wrong, {over_budget} over the call bound",
    )
    assert ok


def test_criterion_11_realness(acceptance_report):
    worst = mpfr(0)
    count = 0
    bad = []
    for name in sorted(corpus()):
        for v in VARIANTS:
            R = reduce_trace(corpus()[name], v) if name not in verifiable() else pipeline(name, v)[0]
            im = max_imag(R.V)
            count += 1
            worst = max(worst, im)
            if im > tolerance(R.p, 44):
                bad.append(f"{name}/{v}")
    ok = not bad
    acceptance_report(11, ok, f"{count} pipeline matrices V, max |Im V_ij| {fmt_log2(worst)}")
    assert ok


def test_criterion_12_determinism(acceptance_report, tmp_path):
    from importlib import resources

    root = resources.files("permred") / "corpus"
    differing = []
    files = sorted(e.name for e in root.iterdir() if e.name.endswith(".bf"))
    for fname in files:
        for v in VARIANTS:
            outs = []
            for threads in ("1", "3"):
                out = tmp_path / f"{fname}.{v}.{threads}.pm.json"
                with contextlib.redirect_stdout(io.StringIO()):
                    code = cli_main(["compile", str(root / fname), "--variant", v, "--out", str(out), "--threads", threads, "-q"])
                assert code == 0
                outs.append(out.read_bytes())
            if outs[0] != outs[1]:
                differing.append(f"{fname}/{v}")
    ok = not differing
    acceptance_report(12, ok, f"{len(files)} files x 2 variants compiled twice (1 and 3 threads), {len(differing)} differ")
    assert ok


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    def report(number, passed, detail):
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}", flush=True)
        return passed

    failed = 0
    for fn_name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            if fn_name.endswith("determinism"):
                with tempfile.TemporaryDirectory() as d:
                    fn(report, Path(d))
            else:
                fn(report)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
