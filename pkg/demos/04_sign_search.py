"""
Exact counts from sign queries
==============================

Suppose we can only learn sign(Delta_C + k) for chosen shifts k. Probing
k = 0 and then doubling away from zero brackets Delta_C; bisection finishes
the job in a logarithmic number of queries.
"""

from permred import SignOracle, corpus, determine_delta
from permred.signsearch import call_bound

for name in ("cz", "zero", "neg4", "ccz"):
    res = determine_delta(SignOracle("brute"), corpus()[name])
    print(f"{name:5s} delta {res.delta:3d}  calls {res.calls} (bound {call_bound(res.delta)})  probes {res.probes}")

###############################################################################
# The permanent backend answers the same queries from the integer instance,
# so the probe sequence is identical.
oracle = SignOracle("permanent", "y")
res = determine_delta(oracle, corpus()["network_and"])
print("permanent backend:", res.delta, res.probes)
