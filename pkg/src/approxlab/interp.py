"""Peetre K-functionals and discrete real-interpolation norms.

``K(x, t) = inf_{y in Y} ||x - y||_X + t ||y||_Y``. Every computed value is
tagged with how it was obtained:

* ``exact``  - closed form (the (l1, l_inf) couple, synthetic profiles);
* ``upper``  - value of an explicit candidate ``y`` (minimisation, smoothing);
* ``lower``  - analytic certificate (barrier / embedding arguments).

Only ``exact`` and ``lower`` values may certify lower-bound conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from . import kernels
from .seqspace import CONVERGED, DIVERGING, INCONCLUSIVE, GrowthRate, MembershipVerdict, classify

EXACT = "exact"
UPPER = "upper"
LOWER = "lower"

DEFAULT_CC1_POINTS = 2 ** 10 + 1


@dataclass(frozen=True)
class KValue:
    value: float
    bound: str

    def __float__(self) -> float:
        return self.value


def _check_t(t: float):
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")


# --------------------------------------------------------------------------
# couples


@dataclass(frozen=True)
class DiscreteL1Linf:
    """``X = l_1^n``, ``Y = l_inf^n``; ``K(x, t) = integral_0^t x*(s) ds``."""

    n: int
    strategy: str = EXACT

    @property
    def embedding_constant(self) -> float:
        return float(self.n)

    def element(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size > self.n:
            raise ValueError(f"vector of length {x.size} exceeds dimension {self.n}")
        return x

    def norm_x(self, x) -> float:
        return float(np.sum(np.abs(x)))

    def norm_y(self, y) -> float:
        return float(np.max(np.abs(y))) if np.size(y) else 0.0

    def k_exact(self, x, t: float) -> float:
        xs = np.sort(np.abs(self.element(x)))[::-1]
        m = min(int(math.floor(t)), xs.size)
        head = math.fsum(xs[:m])
        if m < xs.size:
            head += (t - m) * xs[m]
        return float(head)

    def k_bounds(self, x, t: float):
        v = KValue(self.k_exact(x, t), EXACT)
        return v, v


@dataclass(frozen=True, eq=False)
class SampledCC1:
    """``X = C[0,1]`` (sup norm), ``Y = C^1[0,1]`` with ``||g|| = max(||g||_inf, ||g'||_inf)``.

    Elements are node values of continuous piecewise-linear functions on a
    strictly increasing grid in [0, 1]. Upper bounds come from the
    Lipschitz-envelope smoothing family (each member is a Lipschitz function,
    approximable in C^1 with the same slope bound), lower bounds from the
    barrier dichotomy: if ``||f - g|| <= d`` then ``||g'|| >= barrier(d)``.
    """

    grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 1.0, DEFAULT_CC1_POINTS))
    strategy: str = "certified_lower_bound"
    n_lips: int = 64
    n_levels: int = 64

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0) or g[0] < 0 or g[-1] > 1:
            raise ValueError("grid must be strictly increasing inside [0, 1]")
        object.__setattr__(self, "grid", g)

    embedding_constant = 1.0

    def element(self, x) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(x, CC1Witness):
            return x.xs, x.fs
        if isinstance(x, tuple) and len(x) == 2:
            xs, fs = (np.asarray(v, dtype=np.float64) for v in x)
        elif callable(x):
            xs = self.grid
            fs = np.asarray(x(xs), dtype=np.float64)
        else:
            xs, fs = self.grid, np.asarray(x, dtype=np.float64)
        if xs.shape != fs.shape:
            raise ValueError("samples do not match the grid")
        return xs, fs

    @staticmethod
    def norm_x(fs) -> float:
        return float(np.max(np.abs(fs)))

    @staticmethod
    def c1_norm(xs, gs) -> float:
        slope = np.max(np.abs(np.diff(gs) / np.diff(xs))) if len(xs) > 1 else 0.0
        return float(max(np.max(np.abs(gs)), slope))

    def k_upper(self, x, t: float) -> float:
        xs, fs = self.element(x)
        fnorm = self.norm_x(fs)
        best = min(fnorm, t * self.c1_norm(xs, fs))
        if fnorm == 0:
            return 0.0
        slope_max = float(np.max(np.abs(np.diff(fs) / np.diff(xs))))
        lips = np.concatenate([[0.0], np.geomspace(max(slope_max, 1e-300) * 1e-4,
                                                    slope_max, self.n_lips)]) if slope_max else [0.0]
        for lip in lips:
            lo, hi = kernels.lipschitz_envelopes(xs, fs, float(lip))
            g = 0.5 * (np.asarray(lo) + np.asarray(hi))
            cand = float(np.max(np.abs(fs - g))) + t * self.c1_norm(xs, g)
            best = min(best, cand)
        return best

    def k_lower(self, x, t: float) -> float:
        """Certified lower bound from the barrier dichotomy.

        Any ``g`` with ``||f - g|| = d`` has ``||g'|| >= barrier(d)``, so
        ``K >= inf_d d + t * barrier(d)``. ``barrier`` is non-increasing, so on
        each bracket ``[d_k, d_{k+1}]`` the bound ``d_k + t * barrier(d_{k+1})``
        is rigorous; ``d >= ||f||`` contributes ``||f||``.
        """
        xs, fs = self.element(x)
        fnorm = self.norm_x(fs)
        if fnorm == 0:
            return 0.0
        levels = np.linspace(0.0, fnorm, self.n_levels + 1)
        barriers = [max(kernels.pair_barrier(xs, fs, float(d)), 0.0) for d in levels[1:]]
        brackets = levels[:-1] + t * np.asarray(barriers)
        return float(min(fnorm, brackets.min()))

    def k_bounds(self, x, t: float):
        return KValue(self.k_lower(x, t), LOWER), KValue(self.k_upper(x, t), UPPER)


@dataclass(frozen=True, eq=False)
class GenericFiniteDim:
    """Two norms on R^dim; ``||y||_X <= embedding_constant * ||y||_Y``.

    Upper bounds minimise ``||x-y||_X + t||y||_Y`` (Powell, seeded restarts);
    the certified lower bound is ``min(1, t / C) ||x||_X``.
    """

    norm_x: Callable
    norm_y: Callable
    dim: int
    embedding_constant: float = 1.0
    seed: int = 0
    restarts: int = 4
    strategy: str = "minimize"

    def element(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}")
        return x

    def _objective(self, x, t):
        return lambda y: float(self.norm_x(x - y)) + t * float(self.norm_y(y))

    def k_upper(self, x, t: float) -> float:
        x = self.element(x)
        f = self._objective(x, t)
        rng = np.random.default_rng(self.seed)
        starts = [np.zeros(self.dim), x.copy(), 0.5 * x]
        scale = max(float(np.max(np.abs(x))), 1.0)
        starts += [scale * rng.standard_normal(self.dim) for _ in range(self.restarts)]
        best = min(f(np.zeros(self.dim)), f(x))
        for y0 in starts:
            res = optimize.minimize(f, y0, method="Powell",
                                    options={"xtol": 1e-10, "ftol": 1e-13, "maxfev": 20000})
            best = min(best, float(res.fun))
        return best

    def k_lower(self, x, t: float) -> float:
        x = self.element(x)
        return min(1.0, t / self.embedding_constant) * float(self.norm_x(x))

    def k_bounds(self, x, t: float):
        return KValue(self.k_lower(x, t), LOWER), KValue(self.k_upper(x, t), UPPER)


@dataclass(frozen=True, eq=False)
class SyntheticK:
    """A couple known only through an exact K profile ``k(x, t)``."""

    k: Callable
    strategy: str = EXACT

    def k_bounds(self, x, t: float):
        v = KValue(float(self.k(x, t)), EXACT)
        return v, v


def k_bounds(couple, x, t: float) -> tuple[KValue, KValue]:
    """``(lower, upper)`` for ``K(x, t)``; both are the same exact value when available."""
    _check_t(t)
    return couple.k_bounds(x, t)


def k_functional(couple, x, t: float) -> KValue:
    """Best available value for ``K(x, t)``: the exact value, else the upper bound."""
    lower, upper = k_bounds(couple, x, t)
    return upper


def is_exact(couple) -> bool:
    return getattr(couple, "strategy", None) == EXACT


# --------------------------------------------------------------------------
# profiles


@dataclass(eq=False)
class KProfile:
    ts: np.ndarray
    values: np.ndarray
    bound_types: list

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if np.any(np.diff(self.ts) >= 0):
            raise ValueError("ts must be strictly decreasing")

    @property
    def exact(self) -> bool:
        return all(b == EXACT for b in self.bound_types)

    def monotone(self, tol: float = 1e-10) -> bool:
        """K non-decreasing in t (ts are decreasing)."""
        return bool(np.all(self.values[:-1] >= self.values[1:] - tol))

    def k_over_t_monotone(self, tol: float = 1e-10) -> bool:
        """K(t)/t non-increasing in t."""
        q = self.values / self.ts
        return bool(np.all(q[:-1] <= q[1:] + tol * np.maximum(1.0, np.abs(q[1:]))))

    def csv_rows(self):
        return [("t", "value", "bound_type")] + [
            (float(t), float(v), b) for t, v, b in zip(self.ts, self.values, self.bound_types)]

    def to_dict(self) -> dict:
        return {"ts": self.ts.tolist(), "values": self.values.tolist(),
                "bound_types": list(self.bound_types)}


def k_profile(couple, x, ts) -> KProfile:
    ts = np.asarray(ts, dtype=np.float64)
    vals = [k_functional(couple, x, float(t)) for t in ts]
    return KProfile(ts, [v.value for v in vals], [v.bound for v in vals])


# --------------------------------------------------------------------------
# discrete interpolation norms


GEOMETRIC_RATIO = 0.99


def _geometric_verdict(terms: np.ndarray, partials: np.ndarray, q: float):
    """Ratio test on the last quarter of the terms."""
    tail = terms[-max(len(terms) // 4, 2):]
    if len(tail) < 2 or np.any(tail <= 0):
        return None
    ratios = tail[1:] / tail[:-1]
    if np.all(ratios <= GEOMETRIC_RATIO):
        return MembershipVerdict(CONVERGED, partials, "ratio", converged_by=len(partials))
    if np.all(ratios >= 1 / GEOMETRIC_RATIO):
        rate = float(np.mean(np.log2(ratios)))
        return MembershipVerdict(DIVERGING, partials, "ratio",
                                 rate=GrowthRate("power", rate))
    return None


def _lq_verdict(terms: np.ndarray, q: float) -> MembershipVerdict:
    if math.isinf(q):
        partials = np.maximum.accumulate(terms)
    else:
        partials = kernels.cumulative_sum(terms ** q) ** (1.0 / q)
    verdict = classify(partials, terms ** (1 if math.isinf(q) else q), q)
    if verdict.status == INCONCLUSIVE or verdict.evidence in ("loglog-slope", "log-slope"):
        geometric = _geometric_verdict(terms, partials, q)
        if geometric is not None:
            return geometric
    return verdict


def _check_theta_q(theta: float, q: float):
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")


def rho_terms(couple, x, theta: float, k_max: int) -> tuple[np.ndarray, list]:
    ks = np.arange(k_max + 1)
    vals = [k_functional(couple, x, 2.0 ** -int(k)) for k in ks]
    terms = 2.0 ** (ks * theta) * np.array([v.value for v in vals])
    return terms, [v.bound for v in vals]


def rho_norm(couple, x, theta: float, q: float, k_max: int = 60) -> MembershipVerdict:
    """Truncated ``||{2^{k theta} K(x, 2^-k)}_{k=0..k_max}||_{l_q}`` with a verdict."""
    _check_theta_q(theta, q)
    terms, bounds = rho_terms(couple, x, theta, k_max)
    verdict = _lq_verdict(terms, q)
    verdict.extras["bound_types"] = sorted(set(bounds))
    return verdict


def continuous_norm(couple, x, theta: float, q: float, k_max: int = 60) -> float:
    """``(integral_{2^{-k_max-1}}^1 (t^{-theta} K(x,t))^q dt/t)^{1/q}`` by adaptive quadrature.

    With ``rho`` the truncated discrete norm, monotonicity of ``K`` and of
    ``K(t)/t`` give ``(ln 2)^{1/q} rho / 2 <= I <= (ln 2)^{1/q} 2^theta rho``.
    Meaningful only for exact couples.
    """
    _check_theta_q(theta, q)
    if math.isinf(q):
        raise ValueError("continuous cross-check needs finite q")

    def integrand(u):
        t = math.exp(-u)
        return (math.exp(u * theta) * k_functional(couple, x, t).value) ** q

    total = 0.0
    for k in range(k_max + 1):
        piece, _ = integrate.quad(integrand, k * math.log(2), (k + 1) * math.log(2),
                                  epsabs=0, epsrel=1e-10, limit=200)
        total += piece
    return total ** (1.0 / q)


def abn_norm(couple, x, b_seq, t_seq) -> MembershipVerdict:
    """Truncated ``sup_n b_n K(x, t_n)`` with a growth diagnostic."""
    b = np.asarray(b_seq, dtype=np.float64)
    t = np.asarray(t_seq, dtype=np.float64)
    if b.shape != t.shape or b.ndim != 1 or b.size == 0:
        raise ValueError("b_seq and t_seq must be non-empty and of equal length")
    if np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise ValueError("t_seq must be positive and strictly decreasing")
    terms = b * np.array([k_functional(couple, x, float(tn)).value for tn in t])
    return _lq_verdict(terms, math.inf)


# --------------------------------------------------------------------------
# Krugljak conditions


def _trapezoid_integral(f: Callable, t: float, steps: int, rtol: float, max_steps: int) -> float:
    prev = None
    n = steps
    while True:
        s = np.linspace(0.0, t, n + 1)
        vals = np.array([f(float(si)) if si > 0 else 0.0 for si in s])
        cur = float(np.trapezoid(vals, s)) if hasattr(np, "trapezoid") else float(np.trapz(vals, s))
        if prev is not None and abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        if n >= max_steps:
            raise ArithmeticError(f"quadrature did not stabilise at t={t}")
        prev = cur
        n *= 2


@dataclass
class K2Report:
    gamma: float
    ts: np.ndarray
    ratios: np.ndarray

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "ts": self.ts.tolist(), "ratios": self.ratios.tolist()}


def k2_check(couple, x, t_grid, quadrature_steps: int = 64, rtol: float = 1e-4,
             max_steps: int = 2 ** 16) -> K2Report:
    """Smallest ``gamma`` with ``integral_0^t K(x,s) ds <= gamma K(x,t)`` on ``t_grid``."""
    if not is_exact(couple):
        raise ValueError("k2_check needs a couple with exact K values")
    ts = np.asarray(t_grid, dtype=np.float64)
    if np.any(ts <= 0):
        raise ValueError("t_grid must be positive")
    k = lambda s: k_functional(couple, x, s).value
    ratios = np.empty(ts.size)
    for i, t in enumerate(ts):
        kt = k(float(t))
        if kt == 0:
            raise ValueError("K(x, t) = 0: the element is zero")
        ratios[i] = _trapezoid_integral(k, float(t), quadrature_steps, rtol, max_steps) / kt
    return K2Report(float(ratios.max()), ts, ratios)


@dataclass
class K1Report:
    lower: float
    upper: float

    @property
    def spread(self) -> float:
        return self.upper / self.lower if self.lower > 0 else math.inf

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "spread": self.spread}


def k1_equivalence(couple, x, phi: Callable, ts) -> K1Report:
    """Constants with ``lower * phi(t) <= K(x, t) <= upper * phi(t)`` on ``ts``."""
    ts = np.asarray(ts, dtype=np.float64)
    ratios = np.array([k_functional(couple, x, float(t)).value / phi(float(t)) for t in ts])
    return K1Report(float(ratios.min()), float(ratios.max()))


# --------------------------------------------------------------------------
# C[0,1] / C^1 witnesses


@dataclass(frozen=True, eq=False)
class CC1Witness:
    """Piecewise-linear ``f``: -1 on [0, a], linear on [a, b], 1 on [b, 1]."""

    a: float
    b: float
    xs: np.ndarray
    fs: np.ndarray

    def certificate(self, t: float) -> float:
        """``K(f, t) >= min(1/2, t / (b - a))``: either ``||f - g|| >= 1/2`` or
        ``g(b) - g(a) > 1`` forces ``||g'|| > 1/(b - a)``."""
        _check_t(t)
        return min(0.5, t / (self.b - self.a))


def cc1_witness(a: float, b: float, grid=None) -> CC1Witness:
    if not 0 < a < b < 1:
        raise ValueError(f"need 0 < a < b < 1, got a={a}, b={b}")
    base = np.linspace(0.0, 1.0, DEFAULT_CC1_POINTS) if grid is None else np.asarray(grid, float)
    xs = np.unique(np.concatenate([base, [0.0, a, b, 1.0]]))
    xs = xs[(xs >= 0) & (xs <= 1)]
    fs = np.clip(-1.0 + 2.0 * (xs - a) / (b - a), -1.0, 1.0)
    return CC1Witness(a, b, xs, fs)


def cc1_family(width_of: Callable = lambda t: min(t, 0.25), grid=None) -> Callable:
    """``t -> cc1_witness`` centred at 1/2 with ``b - a = width_of(t)``."""
    def family(t):
        w = width_of(t)
        return cc1_witness(0.5 - w / 2, 0.5 + w / 2, grid)
    return family


@dataclass
class ConditionAScan:
    ts: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    c: float
    verdict: str

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def holds_with(self, c: float) -> bool:
        """Certified lower bounds strictly exceed ``c`` at every grid point."""
        return bool(np.all(self.lower > c))

    def to_dict(self) -> dict:
        return {"ts": self.ts.tolist(), "lower": self.lower.tolist(), "upper": self.upper.tolist(),
                "c": self.c, "verdict": self.verdict}


FLAT_SLOPE = 0.05


def condition_a_scan(couple, witness_family: Callable, t_grid) -> ConditionAScan:
    """Certified lower bounds of ``sup_{||x||=1} K(x, t)`` along ``t_grid``.

    ``witness_family(t)`` returns a unit-norm candidate; its certificate (or
    the couple's lower bound) is the certified value, and the couple's upper
    bound is recorded alongside. Verdict ``holds`` (with ``c`` the smallest
    certified value) when every lower bound is positive and the bounds do not
    decay towards small ``t``; ``fails`` when the upper bounds of the family
    decay like a positive power of ``t``; otherwise ``inconclusive``.
    """
    ts = np.asarray(sorted(set(float(t) for t in t_grid), reverse=True))
    lower = np.empty(ts.size)
    upper = np.empty(ts.size)
    for i, t in enumerate(ts):
        w = witness_family(t)
        lo, up = k_bounds(couple, w, t)
        cert = w.certificate(t) if hasattr(w, "certificate") else lo.value
        lower[i] = max(cert, lo.value) if lo.bound != UPPER else cert
        upper[i] = up.value
    c = float(lower.min())
    tail = slice(max(ts.size // 2, ts.size - 4), ts.size)
    verdict = INCONCLUSIVE
    if ts.size >= 2:
        lt = np.log(ts[tail])
        if c > 0:
            slope_lo = float(np.polyfit(lt, np.log(lower[tail]), 1)[0]) if np.ptp(lt) else 0.0
            if slope_lo <= FLAT_SLOPE:
                verdict = "holds"
        if verdict != "holds" and np.all(upper[tail] > 0):
            slope_up = float(np.polyfit(lt, np.log(upper[tail]), 1)[0])
            if slope_up > FLAT_SLOPE:
                verdict = "fails"
    return ConditionAScan(ts, lower, upper, c, verdict)


@dataclass
class PropositionReport:
    ns: np.ndarray
    ts: np.ndarray
    barriers: np.ndarray
    phis: np.ndarray
    bounds: np.ndarray
    c: float

    @property
    def barrier_ok(self) -> np.ndarray:
        return self.barriers >= self.phis * (1 - 1e-9)

    @property
    def passes(self) -> bool:
        return bool(np.all(self.barrier_ok) and np.all(self.bounds >= self.c))

    @property
    def failures(self) -> list[int]:
        bad = ~self.barrier_ok | (self.bounds < self.c)
        return self.ns[bad].tolist()

    def to_dict(self) -> dict:
        return {"ns": self.ns.tolist(), "ts": self.ts.tolist(), "barriers": self.barriers.tolist(),
                "phis": self.phis.tolist(), "bounds": self.bounds.tolist(), "c": self.c,
                "passes": self.passes, "failures": self.failures}


def proposition_witness(phi: Callable, x_family: Callable, c: float, n_range) -> PropositionReport:
    """Certify ``K(z_n, t_n) >= c`` for ``t_n = 1/phi(1/n)``, ``z_n = x_family(1/n)``.

    For each ``n`` the barrier ``inf {||y'|| : ||z_n - y|| < c}`` is bounded
    below from the samples of ``z_n``; the precondition is that it reaches
    ``phi(1/n)``. Then ``K(z_n, t_n) >= min(c, t_n * barrier) >= c``.
    """
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    ns = np.asarray(list(n_range), dtype=np.int64)
    ts = np.empty(ns.size)
    barriers = np.empty(ns.size)
    phis = np.empty(ns.size)
    bounds = np.empty(ns.size)
    for i, n in enumerate(ns):
        eps = 1.0 / float(n)
        phis[i] = float(phi(eps))
        ts[i] = 1.0 / phis[i]
        z = x_family(eps)
        xs, fs = (z.xs, z.fs) if isinstance(z, CC1Witness) else z
        barriers[i] = max(kernels.pair_barrier(np.asarray(xs, float), np.asarray(fs, float), c), 0.0)
        bounds[i] = min(c, ts[i] * barriers[i])
    return PropositionReport(ns, ts, barriers, phis, bounds, c)


def proposition_family(phi: Callable, points: int = 65) -> Callable:
    """``eps -> cc1_witness`` of width ``1/phi(eps)`` centred at 1/2 on a coarse grid."""
    grid = np.linspace(0.0, 1.0, points)

    def family(eps):
        w = 1.0 / float(phi(eps))
        return cc1_witness(0.5 - w / 2, 0.5 + w / 2, grid)
    return family
