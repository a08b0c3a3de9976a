"""Rearrangement-invariant sequence spaces of power-log type.

Covers the Lorentz spaces l_{p,r} and the Lorentz-Zygmund spaces
l_{p,r,gamma}: decreasing rearrangement, quasi-norms, truncated-norm
membership diagnostics, the solidity and (A3) admissibility checks, and the
index dilation ``b_n = a_{max(1, floor(n/C))}`` with its explicit bound.

Sequences are 1-indexed for norm sums: ``values[0]`` carries weight
``1**(rp-1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels

LORENTZ = "lorentz"
LORENTZ_ZYGMUND = "lorentz-zygmund"

CONVERGED = "converged"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class FiniteSeq:
    """Finite prefix of a non-negative sequence."""

    values: np.ndarray
    sorted_flag: bool

    @classmethod
    def of(cls, values) -> "FiniteSeq":
        if isinstance(values, FiniteSeq):
            return values
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("sequence entries must be finite")
        if arr.size and arr.min() < 0:
            raise ValueError("sequence entries must be non-negative")
        arr.setflags(write=False)
        flag = bool(np.all(arr[:-1] >= arr[1:])) if arr.size > 1 else True
        return cls(arr, flag)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSeq):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def tolist(self) -> list:
        return self.values.tolist()

    def scaled(self, factor: float) -> "FiniteSeq":
        return FiniteSeq.of(abs(factor) * self.values)


def as_seq(values) -> FiniteSeq:
    return FiniteSeq.of(values)


@dataclass(frozen=True)
class SpaceSpec:
    """Parameters of l_{p,r} (``gamma == 0``) or l_{p,r,gamma}."""

    kind: str
    p: float
    r: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in (LORENTZ, LORENTZ_ZYGMUND):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not (self.p > 0):
            raise ValueError(f"p must be positive or inf, got {self.p}")
        if not (self.r > 0) or math.isinf(self.r):
            raise ValueError(f"r must be a positive real, got {self.r}")
        if not (self.gamma >= 0) or math.isinf(self.gamma):
            raise ValueError(f"gamma must be a non-negative real, got {self.gamma}")
        if self.kind == LORENTZ and self.gamma != 0:
            raise ValueError("a Lorentz spec has gamma = 0")

    @classmethod
    def lorentz(cls, p: float, r: float) -> "SpaceSpec":
        return cls(LORENTZ, float(p), float(r), 0.0)

    @classmethod
    def lz(cls, p: float, r: float, gamma: float) -> "SpaceSpec":
        return cls(LORENTZ_ZYGMUND, float(p), float(r), float(gamma))

    @property
    def finite_p(self) -> bool:
        return not math.isinf(self.p)

    def log_weights(self, n: np.ndarray) -> np.ndarray:
        """log of the summation weight at (1-based) positions ``n``.

        ``n^{rp-1}(1+ln n)^{gamma p}`` for finite p, ``n^r(1+ln n)^gamma`` for p = inf.
        """
        n = np.asarray(n, dtype=np.float64)
        ln = np.log(n)
        if self.finite_p:
            out = (self.r * self.p - 1.0) * ln
            if self.gamma:
                out = out + self.gamma * self.p * np.log1p(ln)
        else:
            out = self.r * ln
            if self.gamma:
                out = out + self.gamma * np.log1p(ln)
        return out

    def label(self) -> str:
        p = "inf" if not self.finite_p else _fmt(self.p)
        if self.kind == LORENTZ:
            return f"l:{p}:{_fmt(self.r)}"
        return f"lz:{p}:{_fmt(self.r)}:{_fmt(self.gamma)}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": "inf" if not self.finite_p else self.p,
            "r": self.r,
            "gamma": self.gamma,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        kind = data.get("kind", LORENTZ)
        aliases = {"l": LORENTZ, "Lorentz": LORENTZ, "lz": LORENTZ_ZYGMUND,
                   "LorentzZygmund": LORENTZ_ZYGMUND}
        kind = aliases.get(kind, kind)
        p = data["p"]
        p = math.inf if isinstance(p, str) and p.lower() in ("inf", "infinity") else float(p)
        return cls(kind, p, float(data["r"]), float(data.get("gamma", 0.0)))

    @classmethod
    def parse(cls, text: str) -> "SpaceSpec":
        """Parse ``l:p:r`` or ``lz:p:r:g`` (``inf`` allowed for p)."""
        parts = text.strip().split(":")
        try:
            if parts[0] == "l" and len(parts) == 3:
                return cls.lorentz(_parse_p(parts[1]), float(parts[2]))
            if parts[0] == "lz" and len(parts) == 4:
                return cls.lz(_parse_p(parts[1]), float(parts[2]), float(parts[3]))
        except ValueError as exc:
            raise ValueError(f"bad space spec {text!r}: {exc}") from None
        raise ValueError(f"bad space spec {text!r}; expected l:p:r or lz:p:r:g")


def _parse_p(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _fmt(x: float) -> str:
    return f"{x:g}"


def rearrange(seq) -> FiniteSeq:
    """Decreasing rearrangement ``a*``."""
    seq = FiniteSeq.of(seq)
    if seq.sorted_flag:
        return seq
    return FiniteSeq.of(np.sort(seq.values)[::-1])


def _check_p(p: float):
    if not (p > 0):
        raise ValueError(f"p must be positive or inf, got {p}")


def norm_terms(seq, spec: SpaceSpec) -> np.ndarray:
    """Per-index contributions of the rearranged sequence.

    Finite p: ``n^{rp-1}(1+ln n)^{gamma p}(a_n*)^p`` (the summands).
    p = inf: ``n^r(1+ln n)^gamma a_n*`` (the quantities under the sup).
    """
    a = rearrange(seq).values
    if a.size == 0:
        return np.zeros(0)
    n = np.arange(1, a.size + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_a = np.log(a)
    power = spec.p if spec.finite_p else 1.0
    log_terms = spec.log_weights(n) + power * log_a
    return np.exp(log_terms)


def partial_norms(seq, spec: SpaceSpec) -> np.ndarray:
    """Quasi-norms of the length-N prefixes of ``rearrange(seq)``, N = 1..len."""
    terms = norm_terms(seq, spec)
    if spec.finite_p:
        return kernels.cumulative_sum(terms) ** (1.0 / spec.p)
    return np.maximum.accumulate(terms) if terms.size else terms


def norm(seq, spec: SpaceSpec) -> float:
    terms = norm_terms(seq, spec)
    if terms.size == 0:
        return 0.0
    if spec.finite_p:
        return float(math.fsum(terms) ** (1.0 / spec.p))
    return float(terms.max())


def lorentz_norm(seq, p: float, r: float) -> float:
    """``[sum n^{rp-1}(a_n*)^p]^{1/p}``; ``sup n^r a_n*`` for p = inf."""
    _check_p(p)
    return norm(seq, SpaceSpec.lorentz(p, r))


def lz_norm(seq, p: float, r: float, gamma: float) -> float:
    """Lorentz-Zygmund quasi-norm with natural-log weight ``(1+ln n)^{gamma p}``."""
    _check_p(p)
    return norm(seq, SpaceSpec.lz(p, r, gamma))


# --------------------------------------------------------------------------
# membership diagnostics


@dataclass(frozen=True)
class GrowthRate:
    """Growth of the truncated norm: ``N^e``, ``(ln N)^e`` or ``(ln ln N)^e``."""

    kind: str
    exponent: float

    def describe(self) -> str:
        base = {"power": "N", "log": "ln N", "loglog": "ln ln N"}[self.kind]
        return f"({base})^{self.exponent:.4g}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "exponent": self.exponent}


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit ``ln d_n ~ c - s ln n - t ln(L + ln n) + k/n``."""

    s: float
    t: float
    offset: float
    residual: float


@dataclass(frozen=True)
class Tolerances:
    """Thresholds of the membership classifier."""

    rel_increment: float = 1e-6
    window: float = 0.25
    slope: float = 0.01
    fit_min_len: int = 64
    fit_start: float = 0.1
    fit_residual: float = 5e-3
    power_band: float = 0.01
    log_band: float = 0.05


DEFAULT_TOLERANCES = Tolerances()


@dataclass(eq=False)
class MembershipVerdict:
    """Outcome of a truncated-norm membership test.

    ``status`` is ``converged``, ``diverging`` or ``inconclusive``;
    ``evidence`` names the rule that decided it.
    """

    status: str
    partial_norms: np.ndarray
    evidence: str
    converged_by: int | None = None
    rate: GrowthRate | None = None
    fit: TailFit | None = None
    extras: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return float(self.partial_norms[-1]) if len(self.partial_norms) else 0.0

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def diverging(self) -> bool:
        return self.status == DIVERGING

    def summary(self) -> str:
        if self.status == CONVERGED:
            return f"ConvergedBy({self.converged_by})"
        if self.status == DIVERGING:
            return f"DivergingWithRate({self.rate.describe() if self.rate else '?'})"
        return "Inconclusive"

    def to_dict(self, with_partials: bool = False) -> dict:
        out = {
            "status": self.status,
            "summary": self.summary(),
            "evidence": self.evidence,
            "value": self.value,
            "length": len(self.partial_norms),
            "converged_by": self.converged_by,
            "rate": self.rate.to_dict() if self.rate else None,
        }
        if self.fit is not None:
            out["fit"] = {"s": self.fit.s, "t": self.fit.t, "offset": self.fit.offset,
                          "residual": self.fit.residual}
        if with_partials:
            out["partial_norms"] = self.partial_norms.tolist()
        out.update(self.extras)
        return out


def _tail_lstsq(y, n, offset):
    ln = np.log(n)
    basis = np.column_stack([np.ones_like(ln), ln, np.log(offset + ln), 1.0 / n])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return coef, y - basis @ coef


def fit_power_log_tail(terms: np.ndarray, start: float = 0.1) -> TailFit | None:
    """Fit the last-decade terms to ``n^{-s}(L + ln n)^{-t}`` (plus a ``1/n`` correction).

    The free offset ``L`` absorbs index shifts such as ``ln(n/C)``, the ``1/n``
    column absorbs the half-step bias of staircase (dilated) sequences.
    Returns None when the window contains zeros.
    """
    terms = np.asarray(terms, dtype=np.float64)
    i0 = max(int(len(terms) * start), 1)
    window = terms[i0:]
    if window.size < 8 or np.any(window <= 0):
        return None
    n = np.arange(i0 + 1, len(terms) + 1, dtype=np.float64)
    y = np.log(window)
    lo = -math.log(n[0]) + 0.25

    def sse(offset):
        return float(np.sum(_tail_lstsq(y, n, offset)[1] ** 2))

    best = minimize_scalar(sse, bounds=(lo, 12.0), method="bounded",
                           options={"xatol": 1e-8})
    coef, resid = _tail_lstsq(y, n, best.x)
    return TailFit(s=float(-coef[1]), t=float(-coef[2]), offset=float(best.x),
                   residual=float(np.max(np.abs(resid))))


def _loglog_slope(ns, values):
    x = np.log(ns)
    y = np.log(values)
    return float(np.polyfit(x, y, 1)[0])


def classify(partials: np.ndarray, terms: np.ndarray, p: float,
             tol: Tolerances = DEFAULT_TOLERANCES) -> MembershipVerdict:
    """Decide membership from the truncated norms and the per-index terms.

    Rules, in order:
      1. relative increase over the last ``window`` fraction below
         ``rel_increment`` (or a vanishing tail) -> converged;
      2. a power-log tail fit of the terms with small residual -> integral-test
         verdict on the fitted exponents;
      3. log-log slope of the partial norms over the last decade above
         ``slope`` -> diverging (power); slope against ``ln ln N`` above
         ``slope`` -> diverging (log);
      4. otherwise inconclusive.
    """
    partials = np.asarray(partials, dtype=np.float64)
    terms = np.asarray(terms, dtype=np.float64)
    size = len(partials)
    if size == 0 or partials[-1] == 0.0:
        return MembershipVerdict(CONVERGED, partials, "zero", converged_by=max(size, 1))

    final = partials[-1]
    w0 = min(int(math.floor(size * (1.0 - tol.window))), size - 1)
    gap = (final - partials) / final
    if gap[w0] < tol.rel_increment:
        first = int(np.argmax(gap < tol.rel_increment))
        return MembershipVerdict(CONVERGED, partials, "increment", converged_by=first + 1)

    finite = not math.isinf(p)
    if size >= tol.fit_min_len:
        fit = fit_power_log_tail(terms, tol.fit_start)
        if fit is not None and fit.residual < tol.fit_residual:
            verdict = _tail_verdict(fit, p, finite, tol)
            if verdict is not None:
                status, rate = verdict
                return MembershipVerdict(status, partials, "tail-model",
                                         converged_by=size if status == CONVERGED else None,
                                         rate=rate, fit=fit)

    lo = max(size // 10, 1)
    ns = np.arange(lo, size + 1, dtype=np.float64)
    window_vals = partials[lo - 1:]
    if size >= 10 and np.all(window_vals > 0):
        slope = _loglog_slope(ns, window_vals)
        if slope > tol.slope:
            return MembershipVerdict(DIVERGING, partials, "loglog-slope",
                                     rate=GrowthRate("power", slope))
        if ns[0] > 1:
            log_slope = float(np.polyfit(np.log(np.log(ns)), np.log(window_vals), 1)[0])
            if log_slope > tol.slope:
                return MembershipVerdict(DIVERGING, partials, "log-slope",
                                         rate=GrowthRate("log", log_slope))
    return MembershipVerdict(INCONCLUSIVE, partials, "none")


def _tail_verdict(fit: TailFit, p: float, finite: bool, tol: Tolerances):
    s, t = fit.s, fit.t
    if finite:
        if s > 1 + tol.power_band:
            return CONVERGED, None
        if s < 1 - tol.power_band:
            return DIVERGING, GrowthRate("power", (1 - s) / p)
        if abs(s - 1) > tol.power_band / 2:
            return None
        if t > 1 + tol.log_band:
            return CONVERGED, None
        if t < 1 - tol.log_band:
            return DIVERGING, GrowthRate("log", (1 - t) / p)
        return DIVERGING, GrowthRate("loglog", 1 / p)
    if s > tol.power_band:
        return CONVERGED, None
    if s < -tol.power_band:
        return DIVERGING, GrowthRate("power", -s)
    if abs(s) > tol.power_band / 2:
        return None
    if t >= -tol.log_band:
        return CONVERGED, None
    return DIVERGING, GrowthRate("log", -t)


def truncated_norms(seq, spec: SpaceSpec,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> MembershipVerdict:
    """Partial norms of every prefix and a membership verdict.

    Unsorted input is rearranged first.
    """
    seq = rearrange(seq)
    terms = norm_terms(seq, spec)
    if spec.finite_p:
        partials = kernels.cumulative_sum(terms) ** (1.0 / spec.p)
    else:
        partials = np.maximum.accumulate(terms) if terms.size else terms
    return classify(partials, terms, spec.p, tol)


# --------------------------------------------------------------------------
# admissibility


def solidity_check(a, b, spec: SpaceSpec, tol: float = 1e-12) -> bool:
    """(A2): ``0 <= a_n <= b_n`` implies ``||a|| <= ||b||``."""
    a = FiniteSeq.of(a)
    b = FiniteSeq.of(b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    if np.any(a.values > b.values):
        raise ValueError("domination a_n <= b_n violated")
    na = norm(a, spec)
    nb = norm(b, spec)
    return na <= nb + tol * max(1.0, nb)


def _jump_double(n: int) -> int:
    return 2 * n


@dataclass
class A3Estimate:
    """Empirical constant ``C_S`` of (A3) over a batch of samples."""

    constant: float
    ratios: list
    skipped: list

    def to_dict(self) -> dict:
        return {"constant": self.constant, "ratios": list(self.ratios), "skipped": list(self.skipped)}


def admissibility_a3_check(spec: SpaceSpec, samples: Iterable,
                           jump: Callable[[int], int] = _jump_double) -> A3Estimate:
    """Estimate ``C_S`` in ``||{a_n}|| <= C_S ||{a_K(n)}||`` on truncations.

    Sample entries are ``a_0, a_1, ...``; the subsequence keeps every ``n``
    with ``K(n)`` inside the sample.
    """
    ratios, skipped = [], []
    for idx, sample in enumerate(samples):
        seq = FiniteSeq.of(sample)
        if not seq.sorted_flag:
            raise ValueError(f"sample {idx} is not non-increasing")
        size = len(seq)
        picks = []
        n = 0
        while True:
            k = jump(n)
            if k < n:
                raise ValueError(f"jump map must satisfy K(n) >= n; K({n}) = {k}")
            if k >= size:
                break
            picks.append(k)
            n += 1
        sub = seq.values[picks]
        denom = norm(sub, spec)
        if denom == 0.0:
            skipped.append(idx)
            continue
        ratios.append(norm(seq, spec) / denom)
    constant = max(ratios) if ratios else math.nan
    return A3Estimate(constant, ratios, skipped)


# --------------------------------------------------------------------------
# dilation


def dilate(seq, c: float) -> FiniteSeq:
    """``b_n = a_{max(1, floor(n/c))}`` for ``n = 1 .. floor(c * len)``."""
    if not (c > 0):
        raise ValueError(f"dilation factor must be positive, got {c}")
    seq = FiniteSeq.of(seq)
    if not seq.sorted_flag:
        raise ValueError("dilate expects a non-increasing sequence")
    length = int(math.floor(c * len(seq) + 1e-12))
    n = np.arange(1, length + 1)
    idx = np.maximum(1, np.floor(n / c + 1e-12).astype(np.int64))
    idx = np.minimum(idx, len(seq))
    return FiniteSeq.of(seq.values[idx - 1])


def dilation_constant(c: float, p: float, r: float) -> float:
    """``([c]+1) c^{rp-1} 2^{rp-1}`` when ``p >= 1/r``, else ``([c]+1) c^{rp-1}``."""
    rp = r * p
    base = (math.floor(c) + 1) * c ** (rp - 1)
    return base * 2 ** (rp - 1) if p >= 1 / r else base


@dataclass
class DilationReport:
    """Both sides of the dilation bound.

    ``lhs`` sums over ``n >= C`` only, where ``[n/C] >= 1`` indexes a genuine
    term; this is the inequality the constant is proved for. ``lhs_clamped``
    also counts the clamped prefix ``n < C`` produced by :func:`dilate`, which
    the constant does not cover (mass at ``a_1`` is copied ``[C]`` extra times).
    """

    lhs: float
    rhs: float
    constant: float
    holds: bool
    lhs_clamped: float
    holds_clamped: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "constant": self.constant, "holds": self.holds,
                "lhs_clamped": self.lhs_clamped, "holds_clamped": self.holds_clamped}


def dilation_bound_check(seq, c: float, p: float, r: float, rtol: float = 1e-12) -> DilationReport:
    """Compare ``sum n^{rp-1} a_{[n/C]}^p`` with ``constant * sum m^{rp-1} a_m^p``."""
    _check_p(p)
    if math.isinf(p):
        raise ValueError("dilation bound is stated for finite p")
    seq = FiniteSeq.of(seq)
    if not seq.sorted_flag:
        raise ValueError("dilation bound expects a non-increasing sequence")
    spec = SpaceSpec.lorentz(p, r)
    terms = norm_terms(dilate(seq, c), spec)
    n = np.arange(1, terms.size + 1)
    genuine = np.floor(n / c + 1e-12) >= 1
    lhs = math.fsum(terms[genuine])
    lhs_clamped = math.fsum(terms)
    const = dilation_constant(c, p, r)
    rhs = const * math.fsum(norm_terms(seq, spec))
    bound = rhs * (1 + rtol)
    return DilationReport(lhs, rhs, const, lhs <= bound, lhs_clamped, lhs_clamped <= bound)


def quasi_triangle_modulus(spec: SpaceSpec) -> float:
    """A constant ``kappa`` with ``||a + b|| <= kappa (||a|| + ||b||)``.

    Uses ``(a+b)*_{2n-1}, (a+b)*_{2n} <= a*_n + b*_n`` and the weighted-l_p
    triangle constant ``max(1, 2^{1/p-1})``.
    """
    log_factor = (1 + math.log(2)) ** spec.gamma
    if not spec.finite_p:
        return 2 ** spec.r * log_factor
    rp = spec.r * spec.p
    pair = max(2 ** rp, 1 + 2 ** (rp - 1)) * log_factor ** spec.p
    return pair ** (1 / spec.p) * max(1.0, 2 ** (1 / spec.p - 1))
