"""Base splines h_m: knots, derivative norms and certification."""

import math

from kolmbound.spline_kernel import construct_base_spline, certify_membership, sup_norm_derivative

for m in range(1, 7):
    base = construct_base_spline(m)
    knots = ", ".join(f"{float(k):+.4f}" for k in base.knots)
    norms = [sup_norm_derivative(base.pp, i) for i in range(1, m + 1)]
    print(f"h_{m}: knots [{knots}]")
    print(f"     ||h^(i)|| = {', '.join(f'{v:.6g}' for v in norms)}   (2^(m-2)(m-1)! = {2.0 ** (m - 2) * math.factorial(m - 1):g})")
    print(f"     {certify_membership(base).summary()}")
