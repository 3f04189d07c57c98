"""Distance oracles between a discrete law and a target law.

``kolmogorov_exact`` and ``wasserstein1d_exact`` are exact up to floating
point; ``witness_dm_lower_bound`` evaluates normalised smoothed indicators,
which gives a certified lower bound on d_m; ``monte_carlo_kolmogorov`` is the
sampling fallback with a DKW error proxy.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .spline_kernel import construct_base_spline, scale_translate, sup_norm_derivative

KINDS = ("exact", "monte_carlo", "witness_lower_bound", "upper_bound")
DKW_LEVEL = 0.05
MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class DiscreteDistribution:
    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.atoms, dtype=float).ravel()
        w = np.asarray(self.masses, dtype=float).ravel()
        if x.shape != w.shape or x.size == 0:
            raise ValueError("atoms and masses must be non-empty and of equal length")
        if not np.all(np.isfinite(x)):
            raise ValueError("atoms must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("masses must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1")
        object.__setattr__(self, "atoms", x)
        object.__setattr__(self, "masses", w)

    @classmethod
    def from_weights(cls, atoms, weights) -> "DiscreteDistribution":
        """Sort, merge repeated atoms, drop zero weights and normalise."""
        x = np.asarray(atoms, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        keep = w > 0
        x, w = x[keep], w[keep]
        ux, inv = np.unique(x, return_inverse=True)
        merged = np.bincount(inv, weights=w)
        return cls(ux, merged / merged.sum())

    @classmethod
    def empirical(cls, samples) -> "DiscreteDistribution":
        s = np.asarray(samples, dtype=float).ravel()
        return cls.from_weights(s, np.ones_like(s))

    @property
    def cum(self) -> np.ndarray:
        c = np.cumsum(self.masses)
        c[-1] = 1.0
        return c

    def cdf(self, y):
        idx = np.searchsorted(self.atoms, y, side="right")
        out = np.concatenate([[0.0], self.cum])[idx]
        return float(out) if np.ndim(y) == 0 else out

    def cdf_left(self, y):
        idx = np.searchsorted(self.atoms, y, side="left")
        out = np.concatenate([[0.0], self.cum])[idx]
        return float(out) if np.ndim(y) == 0 else out

    @property
    def mean(self) -> float:
        return float(np.dot(self.atoms, self.masses))

    def expect(self, f) -> float:
        return float(np.dot(f(self.atoms), self.masses))


@dataclass(frozen=True)
class MetricEstimate:
    value: float
    kind: str
    stderr: Optional[float] = None
    n_samples: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if (self.stderr is not None) != (self.kind == "monte_carlo"):
            raise ValueError("stderr is present exactly for monte_carlo estimates")
        object.__setattr__(self, "value", float(self.value))

    def to_json_dict(self) -> dict:
        from .bound_engine import _num

        return {
            "value": _num(self.value),
            "kind": self.kind,
            "stderr": _num(self.stderr),
            "n": self.n_samples,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Kolmogorov


def _cdf_pair(target):
    """(F, F-left-limit) for a target or a bare CDF callable."""
    if isinstance(target, DiscreteDistribution):
        return target.cdf, target.cdf_left
    if callable(target) and not hasattr(target, "cdf"):
        return target, target
    left = getattr(target, "cdf_left", None)
    return target.cdf, (left if left is not None else target.cdf)


def kolmogorov_exact(p: DiscreteDistribution, F, F_left: Optional[Callable] = None) -> MetricEstimate:
    """sup_z |F_p(z) - F(z)| for a monotone F.

    ``F`` may be a CDF callable, a target object with ``cdf`` or another
    DiscreteDistribution.  Since F_p is constant between atoms and F is
    monotone, the supremum is attained at an atom or as a left limit there.
    """
    f, fl = _cdf_pair(F)
    if F_left is not None:
        fl = F_left
    x = p.atoms
    cum = p.cum
    left = cum - p.masses
    left[0] = 0.0
    fx = np.asarray(f(x), dtype=float)
    flx = np.asarray(fl(x), dtype=float)
    val = max(float(np.max(cum - fx)), float(np.max(flx - left)), 0.0)
    return MetricEstimate(min(val, 1.0), "exact")


# ---------------------------------------------------------------------------
# Wasserstein


def _integral_of_cdf(target, t):
    """G(t) = int_{-inf}^t F(s) ds = t F(t) - E[Y 1{Y <= t}]."""
    t = np.asarray(t, dtype=float)
    return t * np.asarray(target.cdf(t)) - np.asarray(target.partial_mean(t))


def _wasserstein_discrete(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    pts = np.union1d(p.atoms, q.atoms)
    diff = np.abs(p.cdf(pts[:-1]) - q.cdf(pts[:-1]))
    return float(np.sum(diff * np.diff(pts)))


def _wasserstein_quadrature(p: DiscreteDistribution, target) -> float:
    x = p.atoms
    cum = p.cum
    q = target.quantile
    lo = float(min(x[0], q(1e-16)))
    hi = float(max(x[-1], q(1 - 1e-16)))
    total = 0.0
    edges = np.concatenate([[lo], x, [hi]])
    levels = np.concatenate([[0.0], cum])
    for a, b, c in zip(edges[:-1], edges[1:], levels):
        if b > a:
            val, _ = integrate.quad(lambda t: abs(c - target.cdf(t)), a, b, epsabs=1e-12, limit=200)
            total += val
    return total


def wasserstein1d_exact(p: DiscreteDistribution, target) -> MetricEstimate:
    """int |F_p(t) - F(t)| dt.

    Uses closed-form integrals of F through the target's partial means when
    available, splitting each inter-atom segment at the quantile where F
    crosses the level of F_p; otherwise falls back to adaptive quadrature.
    """
    if isinstance(target, DiscreteDistribution):
        return MetricEstimate(_wasserstein_discrete(p, target), "exact")
    mean = getattr(target, "mean", None)
    if mean is None or not math.isfinite(mean):
        raise ValueError("target has no finite first moment")
    if not hasattr(target, "partial_mean"):
        return MetricEstimate(_wasserstein_quadrature(p, target), "exact")
    x = p.atoms
    cum = p.cum
    g = _integral_of_cdf(target, x)
    # left tail: F_p = 0 below the first atom
    total = float(g[0])
    # right tail: int_{x_n}^inf (1 - F) = mean - x_n + G(x_n)
    total += float(mean - x[-1] + g[-1])
    if x.size > 1:
        a, b, c = x[:-1], x[1:], cum[:-1]
        s = np.clip(np.asarray(target.quantile(c), dtype=float), a, b)
        gs = _integral_of_cdf(target, s)
        ga, gb = g[:-1], g[1:]
        seg = c * (s - a) - (gs - ga) + (gb - gs) - c * (b - s)
        total += float(np.sum(seg))
    return MetricEstimate(max(total, 0.0), "exact")


# ---------------------------------------------------------------------------
# witness lower bound

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def witness_normaliser(m: int, alpha: float) -> float:
    """max_i (2/alpha)^i ||h_m^{(i)}||: the exact max-derivative norm of h_{m,z,alpha}."""
    return max((2.0 / alpha) ** i * _base_norm(m, i) for i in range(m + 1))


_NORM_CACHE: dict = {}


def _base_norm(m: int, i: int) -> float:
    key = (m, i)
    if key not in _NORM_CACHE:
        _NORM_CACHE[key] = sup_norm_derivative(construct_base_spline(m).pp, i)
    return _NORM_CACHE[key]


def _expect_smoothed(target, m: int, zs: np.ndarray, alpha: float) -> np.ndarray:
    """E h_{m,z,alpha}(Y) for every z in zs."""
    if isinstance(target, DiscreteDistribution):
        return _expect_discrete(target, m, zs, alpha)
    base = construct_base_spline(m)
    knots = np.array([float(k) for k in base.knots])
    # -h'(y) on [z, z+alpha] is (2/alpha)(-h_m')(u) with u = 2(y-z)/alpha - 1
    us, ws = [], []
    for lo, hi in zip(knots[:-1], knots[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        us.append(mid + half * _GL_NODES)
        ws.append(half * _GL_WEIGHTS)
    u = np.concatenate(us)
    w = np.concatenate(ws) * -base(u, 1)
    y = zs[:, None] + alpha * (u[None, :] + 1) / 2
    fy = np.asarray(target.cdf(y.ravel()), dtype=float).reshape(y.shape)
    return fy @ w


def _expect_discrete(p: DiscreteDistribution, m: int, zs: np.ndarray, alpha: float) -> np.ndarray:
    base = construct_base_spline(m)
    u = 2 * (p.atoms[None, :] - zs[:, None]) / alpha - 1
    return np.asarray(base(u.ravel()), dtype=float).reshape(u.shape) @ p.masses


def _witness_values(p, target, m, zs, alpha):
    ex = _expect_discrete(p, m, zs, alpha) if isinstance(p, DiscreteDistribution) else None
    ey = _expect_smoothed(target, m, zs, alpha)
    return np.abs(ex - ey) / witness_normaliser(m, alpha)


def _z_grid(target, p: DiscreteDistribution) -> np.ndarray:
    levels = np.arange(1, 100) / 100.0
    if isinstance(target, DiscreteDistribution):
        zs = np.quantile(target.atoms, levels)
    else:
        zs = np.asarray(target.quantile(levels), dtype=float)
    zs = np.concatenate([zs, np.quantile(p.atoms, levels)])
    return np.unique(zs[np.isfinite(zs)])


def witness_dm_lower_bound(
    pX,
    target,
    m: int,
    z_grid: Optional[np.ndarray] = None,
    alpha_grid: Optional[np.ndarray] = None,
    refine: bool = True,
) -> MetricEstimate:
    """Certified lower bound on d_m(X, Y) from normalised smoothed indicators.

    Each witness h_{m,z,alpha} / max_i ||h^{(i)}_{m,z,alpha}|| lies in the unit
    ball of the d_m test class, so every |E g(X) - E g(Y)| is a lower bound.
    ``pX`` is a DiscreteDistribution or an array of samples.
    """
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    p = pX if isinstance(pX, DiscreteDistribution) else DiscreteDistribution.empirical(pX)
    zs = _z_grid(target, p) if z_grid is None else np.asarray(z_grid, dtype=float)
    alphas = 2.0 ** np.arange(-12, 2) if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    best, best_z, best_a = 0.0, None, None
    for a in alphas:
        vals = _witness_values(p, target, m, zs, a)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_z, best_a = float(vals[k]), float(zs[k]), float(a)
    if refine and best_z is not None:
        dz = np.min(np.diff(zs)) if zs.size > 1 else best_a
        zs2 = best_z - best_a + np.linspace(-1, 1, 41) * max(dz, best_a)
        for a in best_a * 2.0 ** np.linspace(-1, 1, 9):
            vals = _witness_values(p, target, m, zs2, a)
            best = max(best, float(np.max(vals)))
    return MetricEstimate(best, "witness_lower_bound")


# ---------------------------------------------------------------------------
# Monte Carlo


def _block_samples(sampler, seed: int, start: int, size: int) -> np.ndarray:
    bitgen = np.random.Philox(seed).jumped(start // MC_BLOCK)
    return np.asarray(sampler(np.random.Generator(bitgen), size), dtype=float)


def monte_carlo_kolmogorov(
    sampler: Callable, target_cdf, n: int, seed: int, workers: int = 1
) -> MetricEstimate:
    """One-sample Kolmogorov statistic of n draws against ``target_cdf``.

    ``sampler(rng, size)`` draws from X.  Draws are generated in fixed blocks,
    each from its own jumped Philox stream, so the sample (and the result) is
    a function of ``seed`` only, whatever the number of workers.
    """
    n = int(n)
    if n < 100:
        raise ValueError("n must be at least 100")
    starts = list(range(0, n, MC_BLOCK))
    sizes = [min(MC_BLOCK, n - s) for s in starts]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda a: _block_samples(sampler, seed, *a), zip(starts, sizes)))
    else:
        parts = [_block_samples(sampler, seed, s, k) for s, k in zip(starts, sizes)]
    xs = np.sort(np.concatenate(parts))
    if not np.all(np.isfinite(xs)):
        raise ValueError("sampler produced non-finite values")
    f = target_cdf.cdf if hasattr(target_cdf, "cdf") else target_cdf
    fx = np.asarray(f(xs), dtype=float)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - fx)), float(np.max(fx - (i - 1) / n)))
    stderr = math.sqrt(math.log(2 / DKW_LEVEL) / (2 * n))
    return MetricEstimate(d, "monte_carlo", stderr=stderr, n_samples=n, seed=int(seed))
