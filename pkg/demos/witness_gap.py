"""Lower and upper ends of the distance chain for a discretised normal.

The witness value is a certified lower bound on d_m; the exact Wasserstein
distance is an upper bound on d_1.  The Kolmogorov distance is then bounded
with the bounded-density formula fed with d_W.
"""

import math

from kolmbound.bound_engine import bound_bounded
from kolmbound.experiments import rounded_normal_law
from kolmbound.metrics import kolmogorov_exact, wasserstein1d_exact, witness_dm_lower_bound
from kolmbound.targets import SimpleTarget

normal = SimpleTarget("normal", (0.0, 1.0))
A = 1 / math.sqrt(2 * math.pi)
for h in (0.5, 0.2, 0.05):
    p = rounded_normal_law(h)
    dw = wasserstein1d_exact(p, normal).value
    wit = witness_dm_lower_bound(p, normal, 1).value
    dk = kolmogorov_exact(p, normal).value
    print(f"h={h:<5} witness={wit:.4e}  d_W={dw:.4e}  d_K={dk:.4e}  bound={bound_bounded(A, 1, dw).bound_value:.4e}")
