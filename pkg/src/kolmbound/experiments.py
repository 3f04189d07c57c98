"""End-to-end checks of the Kolmogorov bounds against exact oracles.

Each experiment produces an ``ExperimentReport`` holding a certified (or
exact) Kolmogorov distance, the distance fed to the bound, the bound itself
and the comparison.  A report is a soundness violation only when the bound's
validity gate passes, its input is a certified upper bound on d_m, and the
Kolmogorov distance still exceeds the bound.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special, stats

from .bound_engine import BoundResult, MvnTarget, _num, bound_beta_universal, bound_bounded, bound_mvn, nazarov_factor
from .metrics import DiscreteDistribution, MetricEstimate, kolmogorov_exact, monte_carlo_kolmogorov, wasserstein1d_exact
from .targets import BetaTarget

CSV_HEADER = ("experiment", "params", "n", "dm_input", "alpha", "bound", "exact_dK", "margin", "valid")
INV_SQRT_2PI = 1.0 / math.sqrt(2 * math.pi)
CLT_DISTS = ("rademacher", "uniform", "exponential-centered")
# E|X|^3 for the standardised step distributions
CLT_THIRD_MOMENTS = {
    "rademacher": 1.0,
    "uniform": 3 * math.sqrt(3) / 4,
    "exponential-centered": 12 / math.e - 2,
}


@dataclass(frozen=True)
class UrnSpec:
    alpha0: int
    beta0: int
    t: int
    n: int

    def __post_init__(self):
        for name in ("alpha0", "beta0", "t", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def limit(self) -> BetaTarget:
        return BetaTarget(self.alpha0 / self.t, self.beta0 / self.t)

    def params(self) -> dict:
        return {"alpha": self.alpha0, "beta": self.beta0, "t": self.t}


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    params: dict
    n: Optional[int]
    exact_dK: MetricEstimate
    dm_input: MetricEstimate
    bound: BoundResult
    certified_input: bool = True
    notes: str = ""
    inequality_holds: bool = field(init=False)
    margin: float = field(init=False)

    def __post_init__(self):
        dk = self.exact_dK.value
        if self.exact_dK.kind == "monte_carlo":
            # no evidence of a violation unless the estimate clears the DKW band
            dk = max(dk - self.exact_dK.stderr, 0.0)
        object.__setattr__(self, "inequality_holds", bool(dk <= self.bound.bound_value))
        object.__setattr__(self, "margin", self.bound.bound_value - self.exact_dK.value)

    @property
    def soundness_violation(self) -> bool:
        return self.bound.validity_ok and self.certified_input and not self.inequality_holds

    def params_str(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def csv_row(self) -> list:
        return [
            self.experiment,
            self.params_str(),
            "" if self.n is None else str(self.n),
            _num(self.dm_input.value),
            _num(self.bound.alpha_used) or "",
            _num(self.bound.bound_value),
            _num(self.exact_dK.value),
            _num(self.margin),
            "true" if self.bound.validity_ok else "false",
        ]

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "n": self.n,
            "exact_dK": self.exact_dK.to_json_dict(),
            "dm_input": self.dm_input.to_json_dict(),
            "bound": self.bound.to_json_dict(),
            "certified_input": self.certified_input,
            "inequality_holds": self.inequality_holds,
            "soundness_violation": self.soundness_violation,
            "margin": _num(self.margin),
            "notes": self.notes,
        }


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Polya urn


def urn_log_pmf(spec: UrnSpec) -> np.ndarray:
    """log P(S_n = k), k = 0..n (beta-binomial with shapes alpha0/t, beta0/t)."""
    a, b, n = spec.alpha0 / spec.t, spec.beta0 / spec.t, spec.n
    k = np.arange(n + 1)
    log_choose = special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
    return log_choose + special.betaln(k + a, n - k + b) - special.betaln(a, b)


def urn_exact_pmf(spec: UrnSpec) -> DiscreteDistribution:
    """Law of S_n as a DiscreteDistribution on {0, ..., n}."""
    lp = urn_log_pmf(spec)
    w = np.exp(lp - special.logsumexp(lp))
    return DiscreteDistribution.from_weights(np.arange(spec.n + 1, dtype=float), w)


def urn_proportion(spec: UrnSpec) -> DiscreteDistribution:
    """Law of W_n = S_n / n."""
    p = urn_exact_pmf(spec)
    return DiscreteDistribution(p.atoms / spec.n, p.masses)


def validate_urn(spec: UrnSpec, m: int = 1, dw_constant: Optional[float] = None) -> ExperimentReport:
    """Urn proportion against its beta limit.

    The bound is fed the exact Wasserstein distance, which dominates d_1.
    Passing ``dw_constant`` C uses C/n instead; that input is not certified.
    """
    target = spec.limit
    w = urn_proportion(spec)
    dk = kolmogorov_exact(w, target)
    if dw_constant is None:
        dm = wasserstein1d_exact(w, target)
        certified = True
    else:
        if not dw_constant >= 0:
            raise ValueError("dw_constant must be non-negative")
        dm = MetricEstimate(dw_constant / spec.n, "upper_bound")
        certified = False
    bound = bound_beta_universal(target.alpha_p, target.beta_p, m, dm.value)
    return ExperimentReport("urn", {**spec.params(), "m": m}, spec.n, dk, dm, bound, certified)


# ---------------------------------------------------------------------------
# CLT


def rademacher_sum_law(n: int) -> DiscreteDistribution:
    """Law of (X_1 + ... + X_n)/sqrt(n) for Rademacher steps."""
    k = np.arange(n + 1)
    w = stats.binom.pmf(k, n, 0.5)
    return DiscreteDistribution.from_weights((2 * k - n) / math.sqrt(n), w)


def _clt_sampler(dist: str, n: int):
    root = math.sqrt(n)
    if dist == "exponential-centered":
        return lambda rng, size: (rng.standard_gamma(n, size) - n) / root
    if dist == "uniform":
        half = math.sqrt(3.0)

        def draw(rng, size):
            s = np.zeros(size)
            for _ in range(n):
                s += rng.uniform(-half, half, size)
            return s / root

        return draw
    raise ValueError(f"no sampler for {dist!r}")


def validate_clt(
    dist: str,
    n: int,
    m: int = 1,
    n_mc: int = 100_000,
    seed: int = 0,
    dm_input: Optional[float] = None,
) -> ExperimentReport:
    """Standardised sum of n i.i.d. steps against N(0, 1).

    The bound uses the bounded-density formula with A = 1/sqrt(2 pi) and the
    Wasserstein rate (2 + E|X|^3)/sqrt(n).  Rademacher steps give an exact
    Kolmogorov distance; the other step laws use Monte Carlo.
    """
    if dist not in CLT_DISTS:
        raise ValueError(f"dist must be one of {CLT_DISTS}")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    target = stats.norm()
    if dist == "rademacher":
        dk = kolmogorov_exact(rademacher_sum_law(n), target.cdf)
    else:
        dk = monte_carlo_kolmogorov(_clt_sampler(dist, n), target.cdf, n_mc, seed)
    certified = dm_input is None
    notes = ""
    if certified:
        dm = MetricEstimate((2 + CLT_THIRD_MOMENTS[dist]) / math.sqrt(n), "upper_bound")
    else:
        dm = MetricEstimate(dm_input, "upper_bound")
        notes = "user-supplied d_m input; not certified"
        if dm_input == 0:
            notes = "degenerate: zero d_m input gives a zero bound; not certified"
    bound = bound_bounded(INV_SQRT_2PI, m, dm.value, strict=True)
    return ExperimentReport("clt", {"dist": dist, "m": m}, n, dk, dm, bound, certified, notes)


# ---------------------------------------------------------------------------
# Nazarov probe


@dataclass(frozen=True)
class NazarovProbe:
    dim: int
    n_points: int
    max_violation: float
    worst_z: tuple
    worst_alpha: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= 0


def nazarov_increment(z, alpha: float, sigmas) -> np.ndarray:
    """P(Y <= z + alpha) - P(Y <= z) for Y ~ N(0, diag(sigmas^2)); z has shape (..., d)."""
    z = np.asarray(z, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    hi = np.sum(special.log_ndtr((z + alpha) / s), axis=-1)
    lo = np.sum(special.log_ndtr(z / s), axis=-1)
    # exp(hi) - exp(lo) without cancellation
    return np.exp(hi) * -np.expm1(lo - hi)


def nazarov_probe(dim: int, sigma=1.0, grid: int = 10_000, seed: int = 0, alphas=None) -> NazarovProbe:
    """Largest value of lhs - rhs of the normal box-increment inequality.

    The grid mixes i.i.d. normal corners with diagonal corners t(1, ..., 1),
    which is where the increment of the product CDF peaks.
    """
    if int(dim) != dim or not 1 <= dim <= 50:
        raise ValueError("dim must be an integer in [1, 50]")
    dim = int(dim)
    sigmas = np.broadcast_to(np.asarray(sigma, dtype=float), (dim,)).copy()
    if np.any(sigmas <= 0):
        raise ValueError("sigma must be positive")
    alphas = np.geomspace(0.01, 1.0, 20) if alphas is None else np.asarray(alphas, dtype=float)
    per_alpha = max(1, grid // alphas.size)
    rng = np.random.Generator(np.random.Philox(seed))
    n_rand = per_alpha // 2
    n_diag = per_alpha - n_rand
    sig_min = float(sigmas.min())
    factor = nazarov_factor(dim)
    worst, worst_z, worst_a, count = -math.inf, None, None, 0
    for a in alphas:
        zr = rng.standard_normal((n_rand, dim)) * sigmas + rng.normal(0, 1.5, (n_rand, 1)) * sigmas
        zd = np.linspace(-4, 6, n_diag)[:, None] * sigmas[None, :]
        z = np.concatenate([zr, zd])
        viol = nazarov_increment(z, a, sigmas) - a / sig_min * factor
        k = int(np.argmax(viol))
        count += z.shape[0]
        if viol[k] > worst:
            worst, worst_z, worst_a = float(viol[k]), tuple(float(v) for v in z[k]), float(a)
    return NazarovProbe(dim, count, worst, worst_z, worst_a)


# ---------------------------------------------------------------------------
# lattice discretisation of a standard normal vector


def rounded_normal_law(h: float, sigma: float = 1.0, span: float = 9.0) -> DiscreteDistribution:
    """Law of h * round(Y / h), Y ~ N(0, sigma^2), truncated at +-span sigma."""
    K = int(math.ceil(span * sigma / h))
    k = np.arange(-K, K + 1, dtype=float)
    w = special.ndtr((k + 0.5) * h / sigma) - special.ndtr((k - 0.5) * h / sigma)
    return DiscreteDistribution.from_weights(k * h, w)


def validate_mvn_discretization(dim: int, grid_step: float, m: int = 1, seed: int = 0) -> ExperimentReport:
    """Coordinatewise lattice rounding X of Y ~ N(0, I_dim) against Y.

    Under the rounding coupling |X_j - Y_j| <= h/2, so every test function
    with partial derivatives bounded by 1 moves by at most dim * h / 2.  The
    Kolmogorov distance is certified from above by dim times the exact
    one-dimensional value, because the CDFs are products of marginals.
    ``seed`` is accepted for interface uniformity; nothing here is random.
    """
    if int(dim) != dim or not 1 <= dim <= 3:
        raise ValueError("dim must be 1, 2 or 3")
    if not grid_step >= 0:
        raise ValueError("grid_step must be non-negative")
    dim = int(dim)
    if grid_step == 0:
        dk1 = 0.0
    else:
        dk1 = kolmogorov_exact(rounded_normal_law(grid_step), special.ndtr).value
    if dim == 1:
        dk = MetricEstimate(dk1, "exact")
    else:
        dk = MetricEstimate(min(1.0, dim * dk1), "upper_bound")
    dm = MetricEstimate(dim * grid_step / 2, "upper_bound")
    loose, strict = bound_mvn(MvnTarget.isotropic(dim), m, dm.value)
    bound = strict if strict.validity_ok else loose
    params = {"dim": dim, "h": grid_step, "m": m}
    return ExperimentReport("mvn-disc", params, None, dk, dm, bound, True)
