"""
From a Boolean function to an integer permanent and back
========================================================

The occupied submatrix V is scaled by 2^b and rounded. The integer matrix A
then satisfies, for the W variant,

    Delta_C = round(2^(n + 2 gamma) * Per(A) / 2^(b N))

and b is chosen so the rounding error stays below 1/4.
"""

import random

from permred import corpus, delta, dump_instance, recover
from permred.reduce import recovery_quotient, reduce, reduce_trace

###############################################################################
# The smallest instance: C = +1 on one bit gives the 1x1 matrix [2^b].
inst = reduce(corpus()["const1"])
print(dump_instance(inst))

###############################################################################
# Every function in the bundled corpus, both variants. The quotient before
# rounding shows how much slack the choice of b leaves.
for name, C in corpus().items():
    for variant in ("w", "y"):
        R = reduce_trace(C, variant)
        inst = R.instance
        if inst.N > 18:
            print(f"{name:16s} {variant}  N {inst.N:2d}  (emitted, too large to check quickly)")
            continue
        q = recovery_quotient(inst)
        print(f"{name:16s} {variant}  N {inst.N:2d}  b {inst.b:3d}  M {R.M}  "
              f"delta {delta(C):3d}  recovered {recover(inst):3d}  error {float(abs(q - delta(C))):.1e}")

###############################################################################
# Nudging every entry of V by up to 2^-b before rounding changes A but not
# the recovered value.
C = corpus()["chain"]
base = reduce(C)
for seed in range(3):
    inst = reduce(C, perturb=random.Random(seed))
    changed = sum(x != y for r, s in zip(inst.A, base.A) for x, y in zip(r, s))
    print("seed", seed, "entries changed", changed, "recovered", recover(inst))
