"""Kolmogorov-distance bounds from smooth Wasserstein distances.

Every bound here follows the same scheme: for a smoothing width ``alpha``
the Kolmogorov distance is at most

    (derivative bound of h_{m,z,alpha}) * d_m  +  (mass of Y in a window of width alpha)

and the closed forms come from a particular choice of ``alpha``.  The
``*_objective`` helpers expose that pre-optimisation expression so the
closed forms can be compared with a numeric minimisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import betaln, lambertw

from .analysis_constants import M_m, M_prime, N_m, N_prime

VARIANTS = ("Bounded", "Log", "Power", "LogPower")


def _log_pos(x: float) -> float:
    """max(0, log x); zero for non-positive arguments."""
    if x <= 1.0:
        return 0.0
    return math.log(x)


def _check_m(m):
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    return int(m)


def _check_d(d_m):
    d_m = float(d_m)
    if not d_m >= 0 or not math.isfinite(d_m):
        raise ValueError("d_m must be a finite non-negative number")
    return d_m


@dataclass(frozen=True)
class SingularityProfile:
    """Local envelope of a target density near its singular points."""

    variant: str
    A: float
    c: Optional[float] = None
    a: float = 0.0
    b: float = 0.0
    epsilon: float = math.inf
    n_singularities: int = 1
    B_offset: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not self.A > 0:
            raise ValueError("A must be positive")
        if self.B_offset < 0:
            raise ValueError("B_offset must be non-negative")
        if self.variant == "Bounded":
            return
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.n_singularities < 1:
            raise ValueError("n_singularities must be >= 1")
        if self.variant in ("Log", "LogPower"):
            if self.c is None or not self.c > 0:
                raise ValueError(f"{self.variant} profile needs c > 0")
            if self.epsilon > 1.0 / self.c * (1 + 1e-15):
                raise ValueError("epsilon must not exceed 1/c")
        if self.variant == "Power" and not 0 < self.a < 1:
            raise ValueError("Power profile needs 0 < a < 1")
        if self.variant == "LogPower":
            if not 0 <= self.a < 1:
                raise ValueError("LogPower profile needs 0 <= a < 1")
            if self.b < 0:
                raise ValueError("LogPower profile needs b >= 0")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "A": self.A,
            "c": self.c,
            "a": self.a,
            "b": self.b,
            "epsilon": self.epsilon,
            "n_singularities": self.n_singularities,
            "B_offset": self.B_offset,
        }


def _num(x) -> Optional[str]:
    """Shortest decimal string that round-trips the double (<= 17 digits)."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


@dataclass(frozen=True)
class BoundResult:
    formula_id: str
    m: int
    d_m_input: float
    alpha_used: Optional[float]
    raw_bound: float
    validity_ok: bool
    validity_threshold: float
    notes: str = ""
    bound_value: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bound_value", min(float(self.raw_bound), 1.0))

    def to_json_dict(self) -> dict:
        return {
            "formula_id": self.formula_id,
            "m": self.m,
            "d_m": _num(self.d_m_input),
            "alpha": _num(self.alpha_used),
            "raw_bound": _num(self.raw_bound),
            "bound": _num(self.bound_value),
            "valid": bool(self.validity_ok),
            "validity_threshold": _num(self.validity_threshold),
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# univariate closed forms


def bound_bounded(A: float, m: int, d_m: float, strict: bool = True) -> BoundResult:
    """Density bounded by A."""
    m, d = _check_m(m), _check_d(d_m)
    if not A > 0:
        raise ValueError("A must be positive")
    big_m, big_n = M_m(m), N_m(m)
    thr = A / (2 * big_n)
    if d == 0:
        raw, alpha = 0.0, None
    else:
        alpha = (2 * big_n * d / A) ** (1.0 / (m + 1))
        raw = 2 * (A**m * big_m * d) ** (1.0 / (m + 1))
        if m == 1:
            # same quantity, written so that it is exactly sqrt(2 A d)
            raw = math.sqrt(2 * A * d)
        if not strict:
            raw += big_m * d
    if strict:
        return BoundResult("bounded-strict", m, d, alpha, raw, d <= thr, thr, "requires d_m <= A/(2N_m)")
    return BoundResult("bounded", m, d, alpha, raw, True, math.inf, "no restriction on d_m")


def _require(profile: SingularityProfile, variant: str):
    if not isinstance(profile, SingularityProfile) or profile.variant != variant:
        raise ValueError(f"expected a {variant} profile")


def bound_log(profile: SingularityProfile, m: int, d_m: float, strict: bool = True) -> BoundResult:
    """Density with logarithmic singularities p <= -A log|c(y - y_i)|."""
    _require(profile, "Log")
    m, d = _check_m(m), _check_d(d_m)
    A, c, eps = profile.A, profile.c, profile.epsilon
    big_m, big_n = M_m(m), N_m(m)
    thr = A / big_n * min(1.0, (2 * eps) ** (m + 1))
    alpha = None if d == 0 else (big_n * d / A) ** (1.0 / (m + 1))
    raw = 0.0
    if d > 0:
        arg = 2 * A / (c ** (m + 1) * big_m * d)
        scale = (A**m * big_n * d) ** (1.0 / (m + 1))
        if strict:
            # arg >= 1 whenever the gate holds, so the clip only acts outside it
            raw = (2 + _log_pos(arg) / (m + 1)) * scale
        else:
            bracket = 2 + profile.B_offset / (2 * A) + _log_pos(arg) / (m + 1)
            raw = bracket * scale + big_m * d
    if strict:
        return BoundResult(
            "log-strict", m, d, alpha, raw, d <= thr, thr,
            "requires d_m <= (A/N_m) min(1, (2 eps)^(m+1))",
        )
    return BoundResult("log", m, d, alpha, raw, True, math.inf, "positive-part logarithm; no restriction")


def bound_power(profile: SingularityProfile, m: int, d_m: float, strict: bool = True) -> BoundResult:
    """Density with power singularities p <= A |y - y_i|^{-a}, 0 < a < 1."""
    _require(profile, "Power")
    m, d = _check_m(m), _check_d(d_m)
    A, a, eps = profile.A, profile.a, profile.epsilon
    big_m, big_n = M_m(m), N_m(m)
    k = 2**a * A / (1 - a)
    q = m + 1 - a
    thr = k / big_n * min(1.0, (2 * eps) ** q)
    alpha = None if d == 0 else (big_n * d / k) ** (1.0 / q)
    raw = 0.0 if d == 0 else 2 * k ** (m / q) * (big_n * d) ** ((1 - a) / q)
    if strict:
        return BoundResult(
            "power-strict", m, d, alpha, raw, d <= thr, thr,
            "requires d_m <= 2^a A/((1-a) N_m) min(1, (2 eps)^(m+1-a))",
        )
    return BoundResult("power", m, d, alpha, raw + big_m * d, True, math.inf, "no restriction on d_m")


def logpower_threshold_derived(profile: SingularityProfile, m: int) -> float:
    """Strict log-power threshold re-derived from the window conditions on alpha.

    Differs from the gate used by bound_log_power by the factor c^{1-a}.
    """
    A, c, a, b, eps = profile.A, profile.c, profile.a, profile.b, profile.epsilon
    q = m + 1 - a
    lead = 2 ** (a + b + 1) * A / ((1 - a) * N_m(m))
    return lead * min(1.0, (2 * eps) ** q, 2 ** (-(a + b) * q / (1 - a)) * c**-q)


def bound_log_power(profile: SingularityProfile, m: int, d_m: float, strict: bool = True) -> BoundResult:
    """Density with p <= A |y - y_i|^{-a} (-log|c(y - y_i)|)^b."""
    _require(profile, "LogPower")
    m, d = _check_m(m), _check_d(d_m)
    A, c, a, b, eps = profile.A, profile.c, profile.a, profile.b, profile.epsilon
    big_m, big_n = M_m(m), N_m(m)
    q = m + 1 - a
    k = 2 ** (a + b + 1) * A / (1 - a)
    alpha = None if d == 0 else ((1 - a) * big_n * d / (2 ** (a + b + 1) * A)) ** (1.0 / q)
    raw = 0.0
    if d > 0:
        arg = 2 ** (b + 2) * A / ((1 - a) * c**q * big_m * d)
        raw = k ** (m / q) * (big_n * d) ** ((1 - a) / q) * (1 + _log_pos(arg) ** b / q**b)
    if strict:
        thr = (2 ** (a + b + 1) * c ** (1 - a) * A / ((1 - a) * big_n)) * min(
            1.0, (2 * eps) ** q, 2 ** (-(a + b) * (1 + m / (1 - a))) * (1 / c) ** q
        )
        notes = (
            "requires d_m < the stated threshold; the threshold re-derived from the alpha "
            f"window is {_num(logpower_threshold_derived(profile, m))}"
        )
        return BoundResult("logpower-strict", m, d, alpha, raw, d < thr, thr, notes)
    thr = c**-m * A / ((1 - a) * big_m) * 2 ** (1 - m * (b + 1) / (1 - a))
    if d > 0:
        raw += profile.B_offset / 2 * alpha + big_m * d
    return BoundResult("logpower", m, d, alpha, raw, d < thr, thr, "requires d_m < c^-m A/((1-a) M_m) 2^(1-m(b+1)/(1-a))")


def bound_profile(profile: SingularityProfile, m: int, d_m: float, strict: bool = True) -> BoundResult:
    """Dispatch on the profile variant."""
    if profile.variant == "Bounded":
        return bound_bounded(profile.A, m, d_m, strict)
    if profile.variant == "Log":
        return bound_log(profile, m, d_m, strict)
    if profile.variant == "Power":
        return bound_power(profile, m, d_m, strict)
    return bound_log_power(profile, m, d_m, strict)


def bound_beta_universal(alpha_p: float, beta_p: float, m: int, d_m: float) -> BoundResult:
    """Bound valid for every beta target, with mu = min(alpha, beta, 1)."""
    m, d = _check_m(m), _check_d(d_m)
    if not (alpha_p > 0 and beta_p > 0):
        raise ValueError("shape parameters must be positive")
    mu = min(alpha_p, beta_p, 1.0)
    inv_b = math.exp(-betaln(alpha_p, beta_p))
    k = 4 ** (1 - mu) * inv_b / mu
    big_n = N_m(m)
    thr = 2**-mu * inv_b / (big_n * mu)
    alpha = None if d == 0 else (big_n * d / k) ** (1.0 / (m + mu))
    raw = 0.0 if d == 0 else 2 * k ** (m / (m + mu)) * (big_n * d) ** (mu / (m + mu))
    return BoundResult(
        "beta-universal", m, d, alpha, raw, d <= thr, thr,
        f"mu=min(alpha,beta,1)={_num(mu)}; requires d_m <= 2^-mu/(N_m B(alpha,beta) mu)",
    )


# ---------------------------------------------------------------------------
# multivariate normal and exchangeable pairs


@dataclass(frozen=True)
class MvnTarget:
    """Multivariate normal target, described by the diagonal of its covariance.

    ``sigma_min`` is the standard-deviation floor sqrt(min_j Sigma_jj).
    """

    covariance_diag: tuple

    def __post_init__(self):
        diag = tuple(float(v) for v in np.atleast_1d(self.covariance_diag))
        if len(diag) == 0:
            raise ValueError("covariance_diag must be non-empty")
        if not all(v > 0 for v in diag):
            raise ValueError("covariance diagonal entries must be positive")
        object.__setattr__(self, "covariance_diag", diag)

    @classmethod
    def isotropic(cls, dim: int, sigma: float = 1.0) -> "MvnTarget":
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        return cls((sigma**2,) * dim)

    @property
    def dim(self) -> int:
        return len(self.covariance_diag)

    @property
    def sigma_min(self) -> float:
        return math.sqrt(min(self.covariance_diag))


def nazarov_factor(dim: int) -> float:
    """sqrt(2 log d) + 2."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return math.sqrt(2 * math.log(dim)) + 2


def bound_mvn(target: MvnTarget, m: int, d_m: float) -> tuple[BoundResult, BoundResult]:
    """(unconditional, strict) bounds for a multivariate normal target."""
    m, d = _check_m(m), _check_d(d_m)
    sigma = target.sigma_min
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    g = nazarov_factor(target.dim)
    mp, np_ = M_prime(m), N_prime(m)
    if d == 0:
        core, alpha = 0.0, None
    else:
        core = 2 * (g / sigma) ** (m / (m + 1)) * (np_ * d) ** (1.0 / (m + 1))
        alpha = (sigma * np_ * d / g) ** (1.0 / (m + 1))
    if m == 1:
        thr = g / (sigma * np_)
        gate = "requires d_m <= (2+sqrt(2 log d))/(sigma N'_m)"
    else:
        thr = 2 * g / (sigma * mp)
        gate = "requires d_m <= (4+2 sqrt(2 log d))/(sigma M'_m)"
    loose = BoundResult("mvn", m, d, alpha, core + mp * d, True, math.inf, "sigma is the standard-deviation floor")
    strict = BoundResult("mvn-strict", m, d, alpha, core, d <= thr, thr, gate)
    return loose, strict


@dataclass(frozen=True)
class ExchangeablePairInputs:
    A: float
    B: float
    C: float
    dim: int
    sigma: float
    sigma_star: float
    sup_norm_Sigma: float

    def __post_init__(self):
        if min(self.A, self.B, self.C) < 0:
            raise ValueError("A, B, C must be non-negative")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (self.sigma > 0 and self.sigma_star > 0 and self.sup_norm_Sigma > 0):
            raise ValueError("sigma, sigma_star and sup_norm_Sigma must be positive")

    def d3(self) -> float:
        return self.A / 4 + self.B / 12 + (1 + 0.5 * self.dim * math.sqrt(self.sup_norm_Sigma)) * self.C

    def d2(self) -> float:
        return (
            self.A / 4
            + math.sqrt(2 * math.pi) * self.sigma_star * self.B / 16
            + (1 + 0.5 * self.dim * math.sqrt(self.sup_norm_Sigma)) * self.C
        )


def exchangeable_pair_bounds(
    inp: ExchangeablePairInputs, d_3: Optional[float] = None, d_2: Optional[float] = None
) -> tuple[BoundResult, BoundResult]:
    """Kolmogorov bounds from the third- and second-order smooth distances."""
    d3 = inp.d3() if d_3 is None else _check_d(d_3)
    d2 = inp.d2() if d_2 is None else _check_d(d_2)
    g2 = 4 + 2 * math.sqrt(2 * math.log(inp.dim))
    s = inp.sigma
    thr3 = (2 + math.sqrt(2 * math.log(inp.dim))) / (2 * s)
    thr2 = g2 / s
    b3 = 2 * math.sqrt(2) * (g2 / s) ** 0.75 * d3**0.25
    b2 = 2 * (g2 / s) ** (2.0 / 3.0) * d2 ** (1.0 / 3.0)
    a3 = None if d3 == 0 else (s * N_prime(3) * d3 / nazarov_factor(inp.dim)) ** 0.25
    a2 = None if d2 == 0 else (s * N_prime(2) * d2 / nazarov_factor(inp.dim)) ** (1.0 / 3.0)
    r3 = BoundResult("pair-d3", 3, d3, a3, b3, d3 <= thr3, thr3, "requires d_3 <= (2+sqrt(2 log d))/(2 sigma)")
    r2 = BoundResult("pair-d2", 2, d2, a2, b2, d2 <= thr2, thr2, "requires d_2 <= (4+2 sqrt(2 log d))/sigma")
    return r3, r2


# ---------------------------------------------------------------------------
# numeric alpha optimisation

_GOLD = (math.sqrt(5) - 1) / 2


def _golden(f, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 500):
    """Golden-section search for a minimum of a unimodal f on [lo, hi]."""
    c = hi - _GOLD * (hi - lo)
    d = lo + _GOLD * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(hi - lo) <= tol * max(1.0, abs(c) + abs(d)):
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLD * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLD * (hi - lo)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def optimize_alpha_numeric(
    objective: Callable[[float], float],
    alpha_max: float,
    alpha_min: Optional[float] = None,
    grid_size: int = 241,
) -> tuple[float, float]:
    """Minimise ``objective`` over (0, alpha_max].

    A logarithmic grid brackets the minimum, golden-section search in
    log(alpha) refines it, and a final bounded Brent pass polishes the value.
    """
    if not alpha_max > 0 or not math.isfinite(alpha_max):
        raise ValueError("alpha_max must be a positive finite number")
    lo = alpha_max * 1e-12 if alpha_min is None else alpha_min
    if not 0 < lo < alpha_max:
        raise ValueError("need 0 < alpha_min < alpha_max")

    def g(u):
        v = objective(math.exp(u))
        if not math.isfinite(v):
            raise ValueError(f"objective is not finite at alpha={math.exp(u)!r}")
        return float(v)

    us = np.linspace(math.log(lo), math.log(alpha_max), grid_size)
    us[-1] = math.log(alpha_max)
    vals = np.array([g(u) for u in us])
    if np.all(vals == vals[-1]):
        return float(alpha_max), float(vals[-1])
    i = int(np.argmin(vals))
    left, right = us[max(i - 1, 0)], us[min(i + 1, grid_size - 1)]
    u, v = _golden(g, left, right)
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(g, bounds=(left, right), method="bounded", options={"xatol": 1e-14})
    best = min([(v, u), (float(res.fun), float(res.x)), (float(vals[i]), float(us[i]))])
    alpha = min(math.exp(best[1]), alpha_max)
    return alpha, objective(alpha)


def proof_objective(profile: SingularityProfile, m: int, d_m: float, strict: bool = True):
    """Pre-optimisation bound as a function of alpha, plus its admissible alpha range.

    Returns (objective, alpha_max).  For strict forms alpha_max is the window
    on which the objective is a valid bound.
    """
    m, d = _check_m(m), _check_d(d_m)
    big_m, big_n = M_m(m), N_m(m)
    A = profile.A
    lead = (lambda al: big_n * d / al**m) if strict else (lambda al: (big_m + big_n / al**m) * d)
    v = profile.variant
    if v == "Bounded":
        return (lambda al: lead(al) + A * al / 2), (1.0 if strict else 1e6)
    eps = profile.epsilon
    cap = min(1.0, 2 * eps) if strict else 1e6
    if v == "Log":
        c = profile.c
        if strict:
            return (lambda al: lead(al) + A * al * (1 + math.log(2 / (c * al))), cap)
        bo = profile.B_offset
        return (lambda al: lead(al) + A * al * (1 + _log_pos(2 / (c * al))) + bo * al / 2), cap
    a = profile.a
    if v == "Power":
        k = 2**a * A / (1 - a)
        return (lambda al: lead(al) + k * al ** (1 - a)), cap
    if not strict:
        raise ValueError("no numeric objective for the non-strict log-power form")
    b, c = profile.b, profile.c
    k = 2 ** (a + b + 1) * A / (1 - a)
    win = (2 ** -(a + b) * c ** (a - 1)) ** (1 / (1 - a))
    return (lambda al: lead(al) + k * al ** (1 - a) * math.log(2 / (c * al)) ** b), min(cap, win)


def exact_minimizer(profile: SingularityProfile, m: int, d_m: float) -> float:
    """Exact minimiser of the strict proof objective on its admissible window."""
    m, d = _check_m(m), _check_d(d_m)
    if d == 0:
        raise ValueError("d_m must be positive")
    _, cap = proof_objective(profile, m, d, True)
    big_n, A = N_m(m), profile.A
    v = profile.variant
    if v == "Bounded":
        return min((2 * m * big_n * d / A) ** (1.0 / (m + 1)), cap)
    if v == "Power":
        a = profile.a
        k = 2**a * A / (1 - a)
        return min((m * big_n * d / ((1 - a) * k)) ** (1.0 / (m + 1 - a)), cap)
    if v == "Log":
        # f'(alpha) = 0  <=>  log(2/(c alpha)) = k alpha^{-(m+1)},  k = m N d / A
        c = profile.c
        k = m * big_n * d / A
        z = -(m + 1) * k * (c / 2) ** (m + 1)
        if z < -1 / math.e:
            return cap
        w = float(np.real(lambertw(z, -1)))
        t = -w / ((m + 1) * k)
        return min(t ** (-1.0 / (m + 1)), cap)
    a, b, c = profile.a, profile.b, profile.c
    k = 2 ** (a + b + 1) * A / (1 - a)

    def fprime(al):
        ell = math.log(2 / (c * al))
        tail = (1 - a) * ell**b - (b * ell ** (b - 1) if b > 0 else 0.0)
        return -m * big_n * d * al ** (-m - 1) + k * al ** (-a) * tail

    obj, _ = proof_objective(profile, m, d, True)
    # f' is negative near 0; every -/+ sign change is a local minimum and the
    # window endpoint competes with them (f' can turn negative again as the
    # logarithm approaches zero)
    grid = cap * np.logspace(-14, 0, 561)
    signs = [fprime(x) for x in grid]
    cands = [cap]
    for x0, x1, s0, s1 in zip(grid[:-1], grid[1:], signs[:-1], signs[1:]):
        if s0 < 0 <= s1:
            cands.append(brentq(fprime, x0, x1, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))
    return min(cands, key=obj)


def closed_form_alpha(profile: SingularityProfile, m: int, d_m: float) -> float:
    """The smoothing width used by the closed-form strict bound."""
    return bound_profile(profile, m, d_m, True).alpha_used


# ---------------------------------------------------------------------------
# multivariate rate form


def bound_multivariate_rate(
    coeffs: Sequence[float],
    variant: str,
    m: int,
    d_m: float,
    a: Optional[float] = None,
    log_c: Optional[float] = None,
    log_offsets: Optional[Sequence[float]] = None,
    alpha_max: float = 1e3,
) -> BoundResult:
    """Concrete multivariate bound from user-supplied envelope coefficients.

    The window term is sum_i C_i alpha^i (bounded), sum_i alpha^i [C_i
    log+(2/(c alpha)) + D_i] (log) or sum_i C_i alpha^{i-a} (power), where
    i runs from 1 to len(coeffs).  The bound is minimised numerically over
    alpha together with (M'_m + N'_m / alpha^m) d_m.
    """
    m, d = _check_m(m), _check_d(d_m)
    if coeffs is None or len(coeffs) == 0:
        raise ValueError("envelope coefficients are required")
    cs = np.asarray(coeffs, dtype=float)
    if np.any(cs < 0):
        raise ValueError("envelope coefficients must be non-negative")
    powers = np.arange(1, len(cs) + 1, dtype=float)
    if variant == "bounded":
        window = lambda al: float(np.sum(cs * al**powers))
        label = "1/(m+1)"
    elif variant == "log":
        if log_c is None or not log_c > 0:
            raise ValueError("log variant needs log_c > 0")
        ds = np.zeros_like(cs) if log_offsets is None else np.asarray(log_offsets, dtype=float)
        if ds.shape != cs.shape:
            raise ValueError("log_offsets must match coeffs")
        window = lambda al: float(np.sum(al**powers * (cs * _log_pos(2 / (log_c * al)) + ds)))
        label = "1/(m+1) with log correction"
    elif variant == "power":
        if a is None or not 0 < a < 1:
            raise ValueError("power variant needs 0 < a < 1")
        window = lambda al: float(np.sum(cs * al ** (powers - a)))
        label = "(1-a)/(m+1-a)"
    else:
        raise ValueError("variant must be bounded, log or power")
    if d == 0:
        return BoundResult("multivariate-rate", m, d, None, 0.0, True, math.inf, f"rate exponent {label}")
    mp, np_ = M_prime(m), N_prime(m)
    obj = lambda al: (mp + np_ / al**m) * d + window(al)
    alpha, value = optimize_alpha_numeric(obj, alpha_max)
    return BoundResult("multivariate-rate", m, d, alpha, value, True, math.inf, f"rate exponent {label}")
