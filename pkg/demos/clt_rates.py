"""Normalised sums against N(0, 1): how loose is the n^(-1/4) bound?

Rademacher sums use the exact binomial law; the continuous step laws use
Monte Carlo with a DKW error band.
"""

from kolmbound.experiments import validate_clt

for dist in ("rademacher", "uniform", "exponential-centered"):
    print(dist)
    for n in (25, 100, 400, 1600, 6400):
        n_mc = 200_000 if dist != "rademacher" else 0
        r = validate_clt(dist, n, n_mc=max(n_mc, 100), seed=1)
        err = "" if r.exact_dK.stderr is None else f" +- {r.exact_dK.stderr:.1e}"
        print(f"  n={n:>5}  d_K={r.exact_dK.value:.4e}{err:<11}  bound={r.bound.bound_value:.4f}  valid={r.bound.validity_ok}")
