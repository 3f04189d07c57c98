"""Target distributions: densities, CDFs, quantiles and singularity profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special
from scipy.optimize import brentq
from scipy.stats import norm

from .bound_engine import SingularityProfile

VG_LOG_RADIUS = 0.645


def bessel_k(nu: float, x):
    """Modified Bessel function of the second kind, K_nu(x), for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("bessel_k requires x > 0")
    out = special.kv(nu, xa)
    return float(out) if np.ndim(x) == 0 else out


def _bisect_quantile(cdf, u: float, lo: float, hi: float) -> float:
    while cdf(lo) > u:
        lo -= 2 * (hi - lo) + 1
    while cdf(hi) < u:
        hi += 2 * (hi - lo) + 1
    return brentq(lambda y: cdf(y) - u, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)


# ---------------------------------------------------------------------------
# simple targets


@dataclass(frozen=True)
class SimpleTarget:
    """normal(mu, sigma), exponential(lam) or uniform(a, b)."""

    kind: str
    params: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if self.kind == "normal":
            if len(p) != 2 or not p[1] > 0:
                raise ValueError("normal needs (mu, sigma) with sigma > 0")
        elif self.kind == "exponential":
            if len(p) != 1 or not p[0] > 0:
                raise ValueError("exponential needs (lam,) with lam > 0")
        elif self.kind == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise ValueError("uniform needs (a, b) with a < b")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    def density(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "normal":
            mu, s = self.params
            out = norm.pdf(y, mu, s)
        elif self.kind == "exponential":
            (lam,) = self.params
            out = np.where(y >= 0, lam * np.exp(-lam * np.maximum(y, 0)), 0.0)
        else:
            a, b = self.params
            out = np.where((y >= a) & (y <= b), 1.0 / (b - a), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "normal":
            mu, s = self.params
            out = norm.cdf(y, mu, s)
        elif self.kind == "exponential":
            (lam,) = self.params
            out = -np.expm1(-lam * np.maximum(y, 0.0))
        else:
            a, b = self.params
            out = np.clip((y - a) / (b - a), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "normal":
            mu, s = self.params
            out = norm.ppf(u, mu, s)
        elif self.kind == "exponential":
            (lam,) = self.params
            out = -np.log1p(-u) / lam
        else:
            a, b = self.params
            out = a + u * (b - a)
        return float(out) if out.ndim == 0 else out

    @property
    def mean(self) -> float:
        if self.kind == "normal":
            return self.params[0]
        if self.kind == "exponential":
            return 1.0 / self.params[0]
        return 0.5 * sum(self.params)

    def partial_mean(self, t):
        """E[Y 1{Y <= t}]."""
        t = np.asarray(t, dtype=float)
        if self.kind == "normal":
            mu, s = self.params
            z = (t - mu) / s
            out = mu * norm.cdf(z) - s * norm.pdf(z)
        elif self.kind == "exponential":
            (lam,) = self.params
            tt = np.maximum(t, 0.0)
            out = (-np.expm1(-lam * tt) - lam * tt * np.exp(-lam * tt)) / lam
        else:
            a, b = self.params
            tt = np.clip(t, a, b)
            out = (tt**2 - a**2) / (2 * (b - a))
        return float(out) if out.ndim == 0 else out

    def max_density(self) -> float:
        if self.kind == "normal":
            return 1.0 / (self.params[1] * math.sqrt(2 * math.pi))
        if self.kind == "exponential":
            return self.params[0]
        return 1.0 / (self.params[1] - self.params[0])

    def profile(self) -> SingularityProfile:
        return SingularityProfile("Bounded", self.max_density())

    def singularities(self) -> tuple:
        return ()

    def support(self) -> tuple:
        if self.kind == "normal":
            return (-math.inf, math.inf)
        if self.kind == "exponential":
            return (0.0, math.inf)
        return self.params


# ---------------------------------------------------------------------------
# beta


@dataclass(frozen=True)
class BetaTarget:
    alpha_p: float
    beta_p: float

    def __post_init__(self):
        if not (self.alpha_p > 0 and self.beta_p > 0):
            raise ValueError("shape parameters must be positive")

    @property
    def log_beta(self) -> float:
        return float(special.betaln(self.alpha_p, self.beta_p))

    def density(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y > 0) & (y < 1)
        yc = np.where(inside, y, 0.5)
        logp = (
            (self.alpha_p - 1) * np.log(yc) + (self.beta_p - 1) * np.log1p(-yc) - self.log_beta
        )
        out = np.where(inside, np.exp(logp), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        out = special.betainc(self.alpha_p, self.beta_p, np.clip(y, 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        out = special.betaincinv(self.alpha_p, self.beta_p, u)
        return float(out) if out.ndim == 0 else out

    @property
    def mean(self) -> float:
        return self.alpha_p / (self.alpha_p + self.beta_p)

    def partial_mean(self, t):
        t = np.asarray(t, dtype=float)
        out = self.mean * special.betainc(self.alpha_p + 1, self.beta_p, np.clip(t, 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def singularities(self) -> tuple:
        out = []
        if self.alpha_p < 1:
            out.append(0.0)
        if self.beta_p < 1:
            out.append(1.0)
        return tuple(out)

    def support(self) -> tuple:
        return (0.0, 1.0)


def beta_mode_bound(alpha_p: float, beta_p: float) -> float:
    """Maximum of the beta density for shapes >= 1 (one for the uniform case)."""
    if alpha_p < 1 or beta_p < 1:
        raise ValueError("density is unbounded unless both shapes are >= 1")
    if alpha_p == 1 and beta_p == 1:
        return 1.0
    a1, b1 = alpha_p - 1, beta_p - 1

    def xlogx(v):
        return v * math.log(v) if v > 0 else 0.0

    log_a = xlogx(a1) + xlogx(b1) - xlogx(a1 + b1) - float(special.betaln(alpha_p, beta_p))
    return math.exp(log_a)


@dataclass(frozen=True)
class BetaProfiles:
    """Regime-specific profile plus the universal bound parameters."""

    regime: str  # bounded / one-singularity / two-singularities
    profile: SingularityProfile
    universal_mu: float
    universal_K: float
    universal_threshold_factor: float


def beta_profile(t: BetaTarget) -> BetaProfiles:
    al, be = t.alpha_p, t.beta_p
    inv_b = math.exp(-t.log_beta)
    mu = min(al, be, 1.0)
    uk = 4 ** (1 - mu) * inv_b / mu
    uthr = 2**-mu * inv_b / mu
    if al >= 1 and be >= 1:
        prof = SingularityProfile("Bounded", beta_mode_bound(al, be))
        regime = "bounded"
    elif al < 1 and be < 1:
        lo = min(al, be)
        prof = SingularityProfile("Power", 2 ** (1 - lo) * inv_b, a=1 - lo, epsilon=0.5, n_singularities=2)
        regime = "two-singularities"
    else:
        lo = min(al, be)
        prof = SingularityProfile("Power", inv_b, a=1 - lo, epsilon=0.5, n_singularities=1)
        regime = "one-singularity"
    return BetaProfiles(regime, prof, mu, uk, uthr)


# ---------------------------------------------------------------------------
# variance-gamma


_VG_GL_X, _VG_GL_W = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class VarianceGammaTarget:
    r: float
    theta: float
    sigma: float
    mu: float = 0.0
    _nodes: np.ndarray = field(init=False, repr=False, compare=False)
    _cum_mass: np.ndarray = field(init=False, repr=False, compare=False)
    _cum_first: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.r > 0 and self.sigma > 0):
            raise ValueError("r and sigma must be positive")
        if not (math.isfinite(self.theta) and math.isfinite(self.mu)):
            raise ValueError("theta and mu must be finite")
        self._build_tables()

    @property
    def lam(self) -> float:
        return math.sqrt(self.theta**2 + self.sigma**2) / self.sigma**2

    @property
    def skew(self) -> float:
        return self.theta / self.sigma**2

    @property
    def nu(self) -> float:
        return (self.r - 1) / 2

    @property
    def mean(self) -> float:
        return self.mu + self.r * self.theta

    @property
    def variance(self) -> float:
        return self.r * (self.sigma**2 + 2 * self.theta**2)

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return self.density_offset(y - self.mu)

    def density_offset(self, dy):
        """Density at mu + dy; avoids cancellation for tiny offsets."""
        dy = np.asarray(dy, dtype=float)
        x = np.abs(dy)
        pos = x > 0
        xs = np.where(pos, x, 1.0)
        s = math.sqrt(self.theta**2 + self.sigma**2)
        log_pref = -math.log(self.sigma * math.sqrt(math.pi)) - special.gammaln(self.r / 2)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            logv = (
                log_pref
                + self.skew * dy
                - self.lam * xs
                + self.nu * np.log(xs / (2 * s))
                + np.log(special.kve(self.nu, self.lam * xs))
            )
            out = np.where(pos, np.exp(logv), self.density_at_centre())
        return float(out) if out.ndim == 0 else out

    def density_at_centre(self) -> float:
        if self.r <= 1:
            return math.inf
        return self.bounded_A(with_skew_factor=False)

    def bounded_A(self, with_skew_factor: bool = True) -> float:
        nu = self.nu
        val = math.exp(special.gammaln(nu) - special.gammaln(self.r / 2)) / (
            2 * self.sigma * math.sqrt(math.pi)
        )
        val *= (self.sigma**2 / (self.theta**2 + self.sigma**2)) ** nu
        if with_skew_factor and self.r > 2:
            val *= math.exp(self.theta**2 / self.sigma**2 * (self.r - 2))
        return val

    # -- cached integrals --------------------------------------------------
    def _tail_extent(self) -> tuple[float, float]:
        """Offsets from mu beyond which the density is below 1e-18 of its scale."""
        rate_r = self.lam - self.skew
        rate_l = self.lam + self.skew
        scale = math.sqrt(self.variance)
        base = 45.0 + max(0.0, self.nu) * 2 * math.log1p(10 * scale * self.lam)
        return base / rate_l + 2 * scale, base / rate_r + 2 * scale

    def _build_tables(self):
        left, right = self._tail_extent()
        inner = np.concatenate(
            [-np.logspace(math.log10(left), -8, 60), [0.0], np.logspace(-8, math.log10(right), 60)]
        )
        nodes = self.mu + inner
        mass = [0.0]
        first = [0.0]
        for a, b in zip(nodes[:-1], nodes[1:]):
            mass.append(self._quad(a, b, 0))
            first.append(self._quad(a, b, 1))
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_cum_mass", np.cumsum(mass))
        object.__setattr__(self, "_cum_first", np.cumsum(first))

    def _quad(self, a: float, b: float, power: int) -> float:
        if a == b:
            return 0.0
        f = (lambda y: self.density(y)) if power == 0 else (lambda y: y * self.density(y))
        mu = self.mu
        if a < mu < b:
            return self._quad(a, mu, power) + self._quad(mu, b, power)
        if a == mu or b == mu:
            # y - mu = +-u^p flattens the |y - mu|^{r-1} (or log) behaviour at the centre
            p = 2.0 / min(self.r, 1.0)
            sgn, h = (1.0, b - mu) if a == mu else (-1.0, mu - a)

            def g(u):
                step = u**p
                if step == 0.0:
                    return 0.0
                dens = self.density_offset(sgn * step)
                if power == 1:
                    dens *= mu + sgn * step
                return dens * p * u ** (p - 1)

            val, _ = integrate.quad(g, 0.0, h ** (1 / p), epsabs=1e-15, epsrel=1e-12, limit=200)
            return val
        val, _ = integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-12, limit=200)
        return val

    def _accumulate(self, y: float, table: np.ndarray, power: int) -> float:
        nodes = self._nodes
        if y <= nodes[0]:
            return 0.0
        if y >= nodes[-1]:
            return float(table[-1])
        i = int(np.searchsorted(nodes, y, side="right")) - 1
        return float(table[i] + self._quad(nodes[i], y, power))

    def _accumulate_many(self, ys: np.ndarray, table: np.ndarray, power: int) -> np.ndarray:
        """Vectorised ``_accumulate``.

        Away from mu each node interval spans a fixed ratio of distances to
        the centre, so a fixed Gauss-Legendre rule is accurate to rounding;
        the two intervals touching mu go through the adaptive path.
        """
        nodes = self._nodes
        out = np.empty(ys.shape)
        i = np.searchsorted(nodes, ys, side="right") - 1
        below, above = i < 0, i >= nodes.size - 1
        out[below] = 0.0
        out[above] = table[-1]
        mid = ~(below | above)
        c = int(np.searchsorted(nodes, self.mu))
        centre = mid & ((i == c - 1) | (i == c))
        for k in np.flatnonzero(centre):
            out[k] = self._accumulate(float(ys[k]), table, power)
        smooth = np.flatnonzero(mid & ~centre)
        if smooth.size:
            a = nodes[i[smooth]]
            b = ys[smooth]
            half = 0.5 * (b - a)
            pts = (a + half)[:, None] + half[:, None] * _VG_GL_X[None, :]
            f = self.density(pts)
            if power == 1:
                f = f * pts
            out[smooth] = table[i[smooth]] + half * (f @ _VG_GL_W)
        return out

    def cdf(self, y):
        ys = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
        out = self._accumulate_many(ys, self._cum_mass, 0) / self._cum_mass[-1]
        out = np.clip(out, 0.0, 1.0)
        return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))

    def partial_mean(self, t):
        ts = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
        out = self._accumulate_many(ts, self._cum_first, 1) / self._cum_mass[-1]
        return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))

    def quantile(self, u):
        us = np.atleast_1d(np.asarray(u, dtype=float))
        sd = math.sqrt(self.variance)
        out = []
        for v in us:
            if v <= 0:
                out.append(-math.inf)
            elif v >= 1:
                out.append(math.inf)
            else:
                out.append(_bisect_quantile(self.cdf, v, self.mean - 10 * sd, self.mean + 10 * sd))
        out = np.array(out)
        return float(out[0]) if np.ndim(u) == 0 else out.reshape(np.shape(u))

    def singularities(self) -> tuple:
        return (self.mu,) if self.r <= 1 else ()

    def support(self) -> tuple:
        return (-math.inf, math.inf)


def vg_profile(t: VarianceGammaTarget) -> SingularityProfile:
    """Envelope of the variance-gamma density by regime of r."""
    if t.r > 1:
        return SingularityProfile("Bounded", t.bounded_A())
    if t.r == 1:
        s = math.sqrt(t.theta**2 + t.sigma**2)
        return SingularityProfile(
            "Log", 1.0 / t.sigma, c=s / t.sigma**2, epsilon=VG_LOG_RADIUS * t.sigma**2 / s
        )
    A = math.exp(special.gammaln((1 - t.r) / 2) - special.gammaln(t.r / 2)) / (
        (2 * t.sigma) ** t.r * math.sqrt(math.pi)
    )
    return SingularityProfile("Power", A, a=1 - t.r, epsilon=math.inf)


# ---------------------------------------------------------------------------
# generic accessors


def density(t, y):
    return t.density(y)


def cdf(t, y):
    return t.cdf(y)


def quantile(t, u):
    return t.quantile(u)


def target_from_config(cfg: dict):
    """Build a target from {"kind": ..., "params": {...}}."""
    kind = cfg.get("kind")
    p = cfg.get("params", {})
    if kind == "normal":
        return SimpleTarget("normal", (p.get("mu", 0.0), p.get("sigma", 1.0)))
    if kind == "exponential":
        return SimpleTarget("exponential", (p.get("lam", 1.0),))
    if kind == "uniform":
        return SimpleTarget("uniform", (p.get("a", 0.0), p.get("b", 1.0)))
    if kind == "beta":
        return BetaTarget(float(p["alpha"]), float(p["beta"]))
    if kind in ("vg", "variance-gamma"):
        return VarianceGammaTarget(float(p["r"]), float(p.get("theta", 0.0)), float(p.get("sigma", 1.0)), float(p.get("mu", 0.0)))
    raise ValueError(f"unknown target kind {kind!r}")


def target_profile(t) -> SingularityProfile:
    if isinstance(t, BetaTarget):
        return beta_profile(t).profile
    if isinstance(t, VarianceGammaTarget):
        return vg_profile(t)
    return t.profile()


# ---------------------------------------------------------------------------
# envelope checks


@dataclass(frozen=True)
class EnvelopeCheck:
    max_violation: float
    mass_violation: float
    unimodal_shortcut: bool

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-9 and self.mass_violation <= 1e-9


def _envelope(profile: SingularityProfile, x):
    x = np.abs(x)
    if profile.variant == "Bounded":
        return np.full_like(x, profile.A)
    if profile.variant == "Log":
        return -profile.A * np.log(profile.c * x)
    if profile.variant == "Power":
        return profile.A * x ** (-profile.a)
    return profile.A * x ** (-profile.a) * (-np.log(profile.c * x)) ** profile.b


def _envelope_mass(profile: SingularityProfile, delta: float) -> float:
    """int_{-delta}^{delta} envelope(|y|) dy."""
    A = profile.A
    if profile.variant == "Bounded":
        return 2 * A * delta
    if profile.variant == "Log":
        c = profile.c
        return 2 * A * delta * (1 + math.log(1 / (c * delta)))
    if profile.variant == "Power":
        return 2 * A * delta ** (1 - profile.a) / (1 - profile.a)
    val, _ = integrate.quad(lambda y: _envelope(profile, np.array(y)), 0, delta, limit=200)
    return 2 * float(val)


def envelope_check(t, profile: SingularityProfile, grid_size: int = 20001, n_intervals: int = 200, seed: int = 0) -> EnvelopeCheck:
    """Largest excess of the density over the profile envelope, plus interval-mass spot checks."""
    rng = np.random.default_rng(seed)
    sing = t.singularities()
    lo, hi = t.support()
    if profile.variant == "Bounded":
        if math.isfinite(lo) and math.isfinite(hi):
            grid = np.linspace(lo, hi, grid_size)[1:-1]
        else:
            q = t.quantile(np.array([1e-9, 1 - 1e-9]))
            grid = np.linspace(q[0], q[1], grid_size)
        viol = float(np.max(t.density(grid) - profile.A))
        mass_viol = 0.0
        for _ in range(n_intervals):
            delta = float(rng.uniform(0, 0.5)) * (grid[-1] - grid[0])
            a = float(rng.uniform(grid[0] - delta, grid[-1]))
            mass = float(t.cdf(a + 2 * delta) - t.cdf(a))
            mass_viol = max(mass_viol, mass - _envelope_mass(profile, delta))
        return EnvelopeCheck(viol, mass_viol, True)

    eps = profile.epsilon
    viol = -math.inf
    mass_viol = -math.inf
    for s in sing:
        reach = eps if math.isfinite(eps) else 50.0 * math.sqrt(getattr(t, "variance", 1.0))
        offs = np.concatenate([np.logspace(-12, 0, grid_size // 2) * reach * (1 - 1e-12)])
        for sgn in (-1.0, 1.0):
            y = s + sgn * offs
            inside = (y > lo) & (y < hi)
            if not np.any(inside):
                continue
            yy = y[inside]
            viol = max(viol, float(np.max(t.density(yy) - _envelope(profile, yy - s))))
        # windows of half-width delta that touch the singularity carry the most mass
        for _ in range(n_intervals):
            delta = float(rng.uniform(1e-6, 1.0)) * min(reach, 0.5)
            shift = float(rng.uniform(-delta, delta))
            a = s + shift - delta
            mass = float(t.cdf(a + 2 * delta) - t.cdf(a))
            mass_viol = max(mass_viol, mass - _envelope_mass(profile, delta))
    return EnvelopeCheck(viol, mass_viol, len(sing) == 1)
