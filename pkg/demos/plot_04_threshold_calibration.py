"""
Calibrating the election threshold
==================================

The election threshold is ``threshold_base / layer``. This searches for the
base that makes a chosen fraction of nodes head in the first round.
"""

from wsnsim.experiment import calibrate_threshold

res = calibrate_threshold(0.15, n=100, trials=10)
print(res.message)

###############################################################################
# The sweep run before bisection: a low base lets everyone through, a high
# base leaves only the nodes promoted because no head was in range.

for tau, frac in res.sweep[::4]:
    print(f"threshold_base={tau:+.3f}  head fraction={frac:.3f}")

###############################################################################
# Targets below that floor cannot be met and are reported, not invented.

print(calibrate_threshold(0.05, n=100, trials=10).message)
