"""Perfect-spline smoothed indicators.

``h_m`` equals 1 on ``(-inf, -1]``, 0 on ``[1, inf)``, is ``C^{m-1}`` with a
Lipschitz ``(m-1)``-th derivative, and its m-th derivative has constant
magnitude ``2^{m-2}(m-1)!`` on every piece of ``(-1, 1)``.  The pieces are
separated by the Chebyshev extremal points ``cos(pi k / m)``.

Splines are stored as :class:`PiecewisePolynomial` objects with coefficients
in a locally shifted monomial basis, kept both in extended precision
(mpmath, 40 digits) and as float64 arrays for vectorised evaluation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

# Private fixed-precision context; never mutated after import so it is safe
# to share between threads.
_mp = mpmath.MPContext()
_mp.dps = 40

JSON_DIGITS = 25


class SplineCertificationError(RuntimeError):
    """Raised when a constructed spline fails its own certification."""


def _to_mpf(value) -> mpmath.mpf:
    if isinstance(value, str):
        return _mp.mpf(value)
    return _mp.mpf(value)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piecewise polynomial on ``K+1`` finite breakpoints ``b_0 < ... < b_K``.

    There are ``K+2`` pieces: piece 0 is ``(-inf, b_0)``, piece ``i`` for
    ``1 <= i <= K`` is ``[b_{i-1}, b_i)`` and piece ``K+1`` is ``[b_K, inf)``.
    Piece ``i`` is ``sum_j c_ij (x - o_i)^j`` with origin ``o_0 = b_0`` and
    ``o_i = b_{i-1}`` otherwise.  Evaluation is right-continuous.
    """

    breaks: tuple  # mpf
    coeffs: tuple  # tuple of tuples of mpf, one per piece, length degree+1
    degree: int
    breaks_f: np.ndarray = field(init=False, repr=False, compare=False)
    coeffs_f: np.ndarray = field(init=False, repr=False, compare=False)
    origins_f: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        breaks = tuple(_to_mpf(b) for b in self.breaks)
        if len(breaks) < 1:
            raise ValueError("need at least one breakpoint")
        for lo, hi in zip(breaks, breaks[1:]):
            if not lo < hi:
                raise ValueError("breakpoints must be strictly increasing")
        if len(self.coeffs) != len(breaks) + 1:
            raise ValueError("number of pieces must be len(breaks) + 1")
        coeffs = []
        for piece in self.coeffs:
            row = [_to_mpf(c) for c in piece]
            if len(row) > self.degree + 1:
                raise ValueError("piece has more coefficients than degree allows")
            row += [_mp.mpf(0)] * (self.degree + 1 - len(row))
            if not all(_mp.isfinite(c) for c in row):
                raise ValueError("coefficients must be finite")
            coeffs.append(tuple(row))
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "breaks_f", np.array([float(b) for b in breaks]))
        object.__setattr__(
            self, "coeffs_f", np.array([[float(c) for c in row] for row in coeffs])
        )
        object.__setattr__(
            self, "origins_f", np.array([float(o) for o in self.origins])
        )

    @property
    def n_pieces(self) -> int:
        return len(self.coeffs)

    @property
    def origins(self) -> tuple:
        return (self.breaks[0],) + self.breaks

    def piece_bounds(self, i: int) -> tuple[float, float]:
        """Float bounds of piece ``i`` (infinite for the outer pieces)."""
        lo = -math.inf if i == 0 else float(self.breaks[i - 1])
        hi = math.inf if i == self.n_pieces - 1 else float(self.breaks[i])
        return lo, hi

    def derivative(self, order: int = 1) -> "PiecewisePolynomial":
        if order < 0:
            raise ValueError("order must be non-negative")
        if order == 0:
            return self
        if order > self.degree:
            zero = tuple((_mp.mpf(0),) for _ in self.coeffs)
            return PiecewisePolynomial(self.breaks, zero, 0)
        new = []
        for row in self.coeffs:
            d = []
            for j in range(order, self.degree + 1):
                d.append(row[j] * _mp.ff(j, order))
            new.append(tuple(d))
        return PiecewisePolynomial(self.breaks, tuple(new), self.degree - order)

    # -- evaluation -------------------------------------------------------
    def piece_index(self, x, side: str = "right"):
        """Piece containing ``x``; ``side='left'`` gives the left-limit piece."""
        return np.searchsorted(self.breaks_f, x, side=side)

    def __call__(self, x, deriv_order: int = 0, side: str = "right"):
        return evaluate(self, x, deriv_order, side=side)

    def eval_mp(self, x, deriv_order: int = 0, side: str = "right"):
        """Extended-precision evaluation at a single point."""
        x = _to_mpf(x)
        if side == "right":
            i = sum(1 for b in self.breaks if b <= x)
        else:
            i = sum(1 for b in self.breaks if b < x)
        row = self.coeffs[i]
        t = x - self.origins[i]
        acc = _mp.mpf(0)
        for j in range(self.degree, deriv_order - 1, -1):
            acc = acc * t + row[j] * _mp.ff(j, deriv_order)
        return acc

    # -- serialisation ----------------------------------------------------
    def to_json_dict(self, m: int | None = None) -> dict:
        out = {}
        if m is not None:
            out["m"] = int(m)
        out["knots"] = (
            ["-inf"]
            + [_mp.nstr(b, JSON_DIGITS, strip_zeros=False) for b in self.breaks]
            + ["inf"]
        )
        out["pieces"] = [
            [_mp.nstr(c, JSON_DIGITS, strip_zeros=False) for c in row]
            for row in self.coeffs
        ]
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "PiecewisePolynomial":
        knots = data["knots"]
        if knots[0] != "-inf" or knots[-1] != "inf":
            raise ValueError("knot list must carry -inf/inf sentinels")
        pieces = data["pieces"]
        degree = max(len(p) for p in pieces) - 1
        return cls(tuple(knots[1:-1]), tuple(tuple(p) for p in pieces), degree)


def evaluate(pp: PiecewisePolynomial, x, deriv_order: int = 0, side: str = "right"):
    """Evaluate ``pp`` (or a derivative of it) at ``x`` in float64.

    At breakpoints the right limit is returned; pass ``side='left'`` for the
    left limit.  Accepts scalars or arrays.
    """
    if deriv_order < 0:
        raise ValueError("deriv_order must be non-negative")
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=float)
    if deriv_order > pp.degree:
        out = np.zeros_like(xs)
        return float(out) if scalar else out
    idx = pp.piece_index(xs, side=side)
    t = xs - pp.origins_f[idx]
    c = pp.coeffs_f[idx]
    out = np.zeros_like(xs)
    for j in range(pp.degree, deriv_order - 1, -1):
        out = out * t + c[..., j] * math.perm(j, deriv_order)
    return float(out) if scalar else out


def left_limit(pp: PiecewisePolynomial, x, deriv_order: int = 0):
    return evaluate(pp, x, deriv_order, side="left")


def right_limit(pp: PiecewisePolynomial, x, deriv_order: int = 0):
    return evaluate(pp, x, deriv_order, side="right")


# ---------------------------------------------------------------------------
# sup norms


def _piece_sup(coeffs: np.ndarray, length: float) -> float:
    """max |p(t)| for t in [0, length], p given by ascending coefficients."""
    poly = np.polynomial.Polynomial(coeffs)
    cands = [0.0, length]
    dp = poly.deriv()
    if dp.degree() >= 1 and np.any(dp.coef != 0):
        # sign-change scan refined by brentq, backed by companion-matrix roots
        grid = np.linspace(0.0, length, 65)
        vals = dp(grid)
        for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if fa == 0.0:
                cands.append(a)
            elif fa * fb < 0.0:
                cands.append(_bisect_root(dp, a, b))
        for r in dp.roots():
            if abs(r.imag) <= 1e-9 * max(1.0, length) and -1e-12 <= r.real <= length + 1e-12:
                cands.append(min(max(r.real, 0.0), length))
    return float(max(abs(poly(t)) for t in cands))


def _bisect_root(f, a: float, b: float) -> float:
    from scipy.optimize import brentq

    return brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def sup_norm_derivative(pp: PiecewisePolynomial, i: int) -> float:
    """Supremum over the real line of ``|pp^{(i)}|``.

    For ``i == degree`` this is the largest per-piece constant, i.e. the
    Lipschitz constant of the ``(i-1)``-th derivative.
    """
    if i < 0:
        raise ValueError("i must be non-negative")
    d = pp.derivative(i)
    best = 0.0
    for k in range(d.n_pieces):
        lo, hi = d.piece_bounds(k)
        row = d.coeffs_f[k]
        if not (math.isfinite(lo) and math.isfinite(hi)):
            # outer pieces: must be constant for a bounded derivative
            if np.any(row[1:] != 0):
                return math.inf
            best = max(best, abs(float(row[0])))
            continue
        best = max(best, _piece_sup(row, hi - lo))
    return float(best)


# ---------------------------------------------------------------------------
# h_m construction


def chebyshev_knots(m: int) -> tuple:
    """``cos(pi k / m)`` for k = 0..m in increasing order, exactly antisymmetric."""
    ks = []
    for k in range(m + 1):
        if 2 * k == m:
            ks.append(_mp.mpf(0))
        elif 2 * k < m:
            ks.append(_mp.cos(_mp.pi * k / m))
        else:
            ks.append(-_mp.cos(_mp.pi * (m - k) / m))
    return tuple(sorted(ks))


def _right_piece_terms(m: int, k: int, xk: Sequence) -> list[tuple]:
    """Terms (weight, c) with P_k(x) = sum weight * (c - x)^m on I_k."""
    scale = _mp.mpf(2) ** (m - 2) / m
    terms = [(scale, xk[0])]
    for j in range(1, k + 1):
        sign = 1 if (j + 1) % 2 == 0 else -1
        terms.append((-2 * scale * sign, xk[j]))
    return terms


def _shifted_coeffs(m: int, terms, origin, mirrored: bool) -> list:
    """Coefficients in powers of (x - origin).

    Not mirrored: sum w (c - x)^m.  Mirrored: 1 - sum w (c + x)^m.
    """
    out = [_mp.mpf(0)] * (m + 1)
    for w, c in terms:
        if mirrored:
            base = c + origin
            for j in range(m + 1):
                out[j] -= w * _mp.binomial(m, j) * base ** (m - j)
        else:
            base = c - origin
            for j in range(m + 1):
                out[j] += w * _mp.binomial(m, j) * base ** (m - j) * (-1) ** j
    if mirrored:
        out[0] += 1
    return out


@dataclass(frozen=True)
class BaseSpline:
    m: int
    pp: PiecewisePolynomial

    @property
    def knots(self) -> tuple:
        return self.pp.breaks

    def __call__(self, x, deriv_order: int = 0):
        return evaluate(self.pp, x, deriv_order)

    def to_json(self) -> str:
        return json.dumps(self.pp.to_json_dict(self.m))

    @classmethod
    def from_json(cls, text: str) -> "BaseSpline":
        data = json.loads(text)
        return cls(int(data["m"]), PiecewisePolynomial.from_json_dict(data))


def _build_pp(m: int) -> PiecewisePolynomial:
    if m < 1:
        raise ValueError("m must be a positive integer")
    knots = chebyshev_knots(m)  # increasing, knots[0] = -1, knots[-1] = 1
    xk = [_mp.cos(_mp.pi * k / m) if 2 * k != m else _mp.mpf(0) for k in range(m + 1)]
    pieces = [tuple([_mp.mpf(1)] + [_mp.mpf(0)] * m)]
    # interval between knots[i] and knots[i+1] equals (x_{k+1}, x_k] with k = m-1-i
    for i in range(m):
        k = m - 1 - i
        origin = knots[i]
        if 2 * k < m:
            coeffs = _shifted_coeffs(m, _right_piece_terms(m, k, xk), origin, False)
        else:
            kk = m - 1 - k
            coeffs = _shifted_coeffs(m, _right_piece_terms(m, kk, xk), origin, True)
        pieces.append(tuple(coeffs))
    pieces.append(tuple([_mp.mpf(0)] * (m + 1)))
    return PiecewisePolynomial(knots, tuple(pieces), m)


@lru_cache(maxsize=64)
def construct_base_spline(m: int, tol: float = 1e-10) -> BaseSpline:
    """Build and certify ``h_m``.  Raises SplineCertificationError on failure."""
    spline = BaseSpline(m, _build_pp(m))
    report = certify_membership(spline, tol)
    if not report.passed:
        raise SplineCertificationError(f"h_{m} failed certification: {report.summary()}")
    return spline


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class CertificationReport:
    m: int
    tol: float
    continuity_residual: float
    continuity_by_order: tuple
    range_violation: float
    symmetry_residual: float
    monotonicity_violation: float
    top_derivative_magnitudes: tuple
    top_derivative_residual: float

    @property
    def passed(self) -> bool:
        return (
            self.continuity_residual <= self.tol
            and self.range_violation <= self.tol
            and self.symmetry_residual <= self.tol
            and self.monotonicity_violation <= self.tol
            and self.top_derivative_residual <= self.tol
        )

    def summary(self) -> str:
        return (
            f"continuity={self.continuity_residual:.3e} range={self.range_violation:.3e} "
            f"symmetry={self.symmetry_residual:.3e} monotone={self.monotonicity_violation:.3e} "
            f"top_derivative={self.top_derivative_residual:.3e} -> "
            f"{'pass' if self.passed else 'fail'}"
        )


def certify_membership(base: BaseSpline, tol: float = 1e-10) -> CertificationReport:
    """Check C^{m-1} continuity, range, symmetry and the perfect-spline property."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, pp = base.m, base.pp

    by_order = []
    for order in range(m):
        worst = 0.0
        for b in pp.breaks:
            lhs = pp.eval_mp(b, order, side="left")
            rhs = pp.eval_mp(b, order, side="right")
            worst = max(worst, float(abs(lhs - rhs)))
        by_order.append(worst)

    # 10^4 points per unit length on [-1.5, 1.5]
    grid = np.linspace(-1.5, 1.5, 30001)
    vals = evaluate(pp, grid)
    range_violation = float(max(0.0, np.max(vals - 1.0), np.max(-vals)))
    sym = float(np.max(np.abs(vals + evaluate(pp, -grid) - 1.0)))
    mono = float(max(0.0, np.max(evaluate(pp, grid, 1)))) if m >= 1 else 0.0

    target = math.ldexp(math.factorial(m - 1), m - 2)
    mags = tuple(
        float(abs(pp.coeffs[i][m] * _mp.factorial(m))) for i in range(1, pp.n_pieces - 1)
    )
    top_res = max(abs(v - target) / target for v in mags)

    return CertificationReport(
        m=m,
        tol=tol,
        continuity_residual=max(by_order) if by_order else 0.0,
        continuity_by_order=tuple(by_order),
        range_violation=range_violation,
        symmetry_residual=sym,
        monotonicity_violation=mono,
        top_derivative_magnitudes=mags,
        top_derivative_residual=top_res,
    )


def verify_knot_identities(n: int) -> dict[str, float]:
    """Residuals of the four alternating cosine-power sum identities for ``n``.

    even_top:  sum_{j=1}^{n-1} (-1)^{j+1} cos^{2n}(pi j/2n) = 1/2 - n/2^{2n-1}
    even_low:  same sum with power 2l, 1 <= l <= n-1, equals 1/2
    odd_top:   sum_{j=1}^{n} (-1)^{j+1} cos^{2n+1}(pi j/(2n+1)) = 1/2 - (2n+1)/2^{2n+1}
    odd_low:   same sum with power 2l+1, 0 <= l <= n-1, equals 1/2
    Empty sums are zero; an empty family reports residual 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def alt_sum(power: int, denom: int, upper: int):
        return _mp.fsum(
            (-1) ** (j + 1) * _mp.cos(_mp.pi * j / denom) ** power for j in range(1, upper + 1)
        )

    half = _mp.mpf(1) / 2
    even_top = abs(alt_sum(2 * n, 2 * n, n - 1) - (half - _mp.mpf(n) / _mp.mpf(2) ** (2 * n - 1)))
    even_low = max(
        [abs(alt_sum(2 * l, 2 * n, n - 1) - half) for l in range(1, n)], default=_mp.mpf(0)
    )
    odd_top = abs(
        alt_sum(2 * n + 1, 2 * n + 1, n) - (half - _mp.mpf(2 * n + 1) / _mp.mpf(2) ** (2 * n + 1))
    )
    odd_low = max(
        [abs(alt_sum(2 * l + 1, 2 * n + 1, n) - half) for l in range(0, n)], default=_mp.mpf(0)
    )
    return {
        "even_top": float(even_top),
        "even_low": float(even_low),
        "odd_top": float(odd_top),
        "odd_low": float(odd_low),
    }


# ---------------------------------------------------------------------------
# scaled / product indicators


@dataclass(frozen=True)
class SmoothedIndicator:
    """``h_{m,z,alpha}(x) = h_m((2/alpha)(x - z - alpha/2))``."""

    m: int
    z: float
    alpha: float
    pp: PiecewisePolynomial

    def __call__(self, x, deriv_order: int = 0):
        return evaluate(self.pp, x, deriv_order)

    def max_derivative_norm(self) -> float:
        """max over 0 <= i <= m of the sup norm of the i-th derivative."""
        return max(sup_norm_derivative(self.pp, i) for i in range(self.m + 1))


def scale_translate(base: BaseSpline, z: float, alpha: float) -> SmoothedIndicator:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    za, aa = _to_mpf(z), _to_mpf(alpha)
    centre, half = za + aa / 2, aa / 2
    pp = base.pp
    breaks = tuple(centre + half * b for b in pp.breaks)
    factor = 1 / half
    coeffs = tuple(tuple(c * factor**j for j, c in enumerate(row)) for row in pp.coeffs)
    return SmoothedIndicator(base.m, float(z), float(alpha), PiecewisePolynomial(breaks, coeffs, pp.degree))


def smoothed_indicator(m: int, z: float, alpha: float) -> SmoothedIndicator:
    return scale_translate(construct_base_spline(m), z, alpha)


@dataclass(frozen=True)
class ProductIndicator:
    m: int
    alpha: float
    z: tuple
    factors: tuple

    @property
    def dim(self) -> int:
        return len(self.z)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected trailing dimension {self.dim}")
        out = np.ones(x.shape[:-1])
        for j, f in enumerate(self.factors):
            out = out * f(x[..., j])
        return float(out) if out.ndim == 0 else out

    def partial(self, orders: Sequence[int], x):
        """Mixed partial derivative with per-coordinate orders."""
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1])
        for j, (f, k) in enumerate(zip(self.factors, orders)):
            out = out * f(x[..., j], k)
        return float(out) if out.ndim == 0 else out


def product_indicator(m: int, z: Sequence[float], alpha: float) -> ProductIndicator:
    z = tuple(float(v) for v in np.atleast_1d(z))
    if len(z) == 0:
        raise ValueError("z must be non-empty")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    base = construct_base_spline(m)
    return ProductIndicator(m, float(alpha), z, tuple(scale_translate(base, zj, alpha) for zj in z))
