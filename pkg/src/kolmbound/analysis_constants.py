"""Named constants used by the Kolmogorov bounds.

M_m, N_m bound the derivatives of the scaled univariate splines; M'_m, N'_m
are their product-spline (multivariate) counterparts.  Favard and
Landau-Kolmogorov constants control intermediate derivative norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


def _check_m(m):
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    return int(m)


def log_M(m: int) -> float:
    m = _check_m(m)
    return (m - 2) * math.log(2.0) + math.lgamma(m)


def M_m(m: int) -> float:
    """2^{m-2} (m-1)!."""
    m = _check_m(m)
    if m <= 20:
        return math.ldexp(float(math.factorial(m - 1)), m - 2)
    return math.exp(log_M(m))


def N_m(m: int) -> float:
    m = _check_m(m)
    return math.ldexp(M_m(m), m)


def M_prime(m: int) -> float:
    """M_m for m <= 4, else 2^{3m/2-2} (m-1)!."""
    m = _check_m(m)
    if m <= 4:
        return M_m(m)
    return math.exp((1.5 * m - 2) * math.log(2.0) + math.lgamma(m))


def N_prime(m: int) -> float:
    m = _check_m(m)
    return math.ldexp(M_prime(m), m)


@dataclass(frozen=True)
class ConstantsTable:
    m: int
    M_m: float
    N_m: float
    M_prime_m: float
    N_prime_m: float

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "M_m": self.M_m,
            "N_m": self.N_m,
            "M_prime_m": self.M_prime_m,
            "N_prime_m": self.N_prime_m,
        }


def constants_table(m: int) -> ConstantsTable:
    return ConstantsTable(m, M_m(m), N_m(m), M_prime(m), N_prime(m))


# ---------------------------------------------------------------------------
# Favard and Landau-Kolmogorov


@dataclass(frozen=True)
class FavardValue:
    r: int
    value: float
    truncation_error: float


def favard_constant(r: int, tol: float = 1e-14) -> FavardValue:
    """K_r = (4/pi) sum_j [(-1)^j / (2j+1)]^{r+1}."""
    if int(r) != r or r < 0:
        raise ValueError("r must be a non-negative integer")
    if not tol > 0:
        raise ValueError("tol must be positive")
    r = int(r)
    if r == 0:
        return FavardValue(0, 1.0, 0.0)
    if r == 1:
        return FavardValue(1, math.pi / 2, 0.0)
    scale = 4.0 / math.pi
    if r % 2 == 0:
        # alternating series: remainder below the first omitted term
        total, j = 0.0, 0
        while True:
            term = scale * (2 * j + 1) ** -(r + 1.0)
            if term < tol / 2:
                return FavardValue(r, total, term)
            total += term if j % 2 == 0 else -term
            j += 1
    # odd r: all terms positive, sum_{j<J} plus integral tail estimate
    J = max(4, int(math.ceil(0.5 * (scale / (r * tol)) ** (1.0 / r))) + 1)
    J = min(J, 10**6)
    k = np.arange(J, dtype=float)
    head = float(np.sum((2 * k[::-1] + 1) ** -(r + 1.0)))
    tail_hi = (2 * J - 1) ** -float(r) / (2 * r)
    tail_lo = (2 * J + 1) ** -float(r) / (2 * r)
    value = scale * (head + 0.5 * (tail_hi + tail_lo))
    return FavardValue(r, value, scale * 0.5 * (tail_hi - tail_lo))


def landau_kolmogorov_constant(m: int, k: int) -> float:
    """C_{m,k} = K_{m-k} K_m^{-1+k/m}."""
    m = _check_m(m)
    if int(k) != k or not 1 <= k <= m - 1:
        raise ValueError("k must satisfy 1 <= k <= m-1")
    km = favard_constant(m).value
    return favard_constant(m - int(k)).value * km ** (-1.0 + k / m)


# ---------------------------------------------------------------------------
# derivative bounds


def max_derivative_bound(m: int, alpha: float, multivariate: bool = False) -> float:
    """Bound on the derivative norms of a scaled spline h_{m,z,alpha}.

    For alpha <= 1 it covers orders 0..m; for alpha > 1 it covers 1..m.
    """
    m = _check_m(m)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    big_m = M_prime(m) if multivariate else M_m(m)
    big_n = math.ldexp(big_m, m)
    if alpha <= 1:
        return big_n / alpha**m
    return big_m * (1.0 + 2.0**m / alpha**m)


# ---------------------------------------------------------------------------
# incomplete gamma

_EPS = 1e-16
_TINY = 1e-300


def _lower_series(r: float, x: float) -> float:
    """Regularised lower gamma P(r, x) by the power series."""
    term = 1.0 / r
    total = term
    ap = r
    for _ in range(100000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + r * math.log(x) - math.lgamma(r))


def _upper_cf(r: float, x: float) -> float:
    """Regularised upper gamma Q(r, x) by the modified Lentz continued fraction."""
    b = x + 1.0 - r
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - r)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + r * math.log(x) - math.lgamma(r)) * h


def upper_incomplete_gamma(r: float, x: float, regularized: bool = False) -> float:
    """Gamma(r, x) = int_x^inf t^{r-1} e^{-t} dt."""
    if not r > 0:
        raise ValueError("r must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        q = 1.0
    elif x < r + 1.0:
        q = 1.0 - _lower_series(r, x)
    else:
        q = _upper_cf(r, x)
    if regularized:
        return q
    return q * math.exp(gammaln(r))


def check_incomplete_gamma_bound(b: float, y: float) -> bool:
    """True iff e^y > 2^{b+1} and Gamma(b+1, y) <= 2^{b+1} y^b e^{-y}."""
    if b < 0:
        raise ValueError("b must be non-negative")
    if not y > (b + 1) * math.log(2.0):
        return False
    lhs = upper_incomplete_gamma(b + 1.0, y)
    rhs = 2.0 ** (b + 1) * y**b * math.exp(-y)
    return bool(lhs <= rhs)
