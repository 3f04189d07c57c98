"""Polya urn proportions against their beta limits.

For each urn the exact Kolmogorov distance is compared with the universal
beta bound fed with the exact Wasserstein distance.  The last column is the
fitted log-log slope of the bound in n next to the predicted -mu/(1+mu).
"""

import numpy as np

from kolmbound.experiments import UrnSpec, validate_urn

ns = [10, 100, 1000, 10_000]
print(f"{'urn':>12} {'n':>6} {'d_W':>11} {'d_K':>11} {'bound':>11}")
for a, b, t in [(1, 1, 1), (2, 3, 1), (1, 2, 2), (3, 1, 3)]:
    raw = []
    for n in ns:
        r = validate_urn(UrnSpec(a, b, t, n))
        raw.append(r.bound.raw_bound)
        print(f"{(a, b, t)!s:>12} {n:>6} {r.dm_input.value:11.3e} {r.exact_dK.value:11.3e} {r.bound.bound_value:11.3e}")
    mu = min(a / t, b / t, 1)
    slope = np.polyfit(np.log(ns), np.log(raw), 1)[0]
    print(f"{'':>12} slope {slope:+.4f} (predicted {-mu / (1 + mu):+.4f})")
