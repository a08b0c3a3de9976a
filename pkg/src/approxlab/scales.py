"""Lorentz and Lorentz-Zygmund scales of smoothness.

Witness sequences for each strict inclusion between members of the scales,
the closed-form integral-test oracle for power-log sequences, the
``||1_N||`` ratio asymptotics, and the convexity / doubling hypotheses used
to realise error sequences.

All witnesses live in the family ``a_n = n^{-beta} (1 + log n)^{-delta}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .profile import BOUNDED, DIVERGES, RatioProfile, three_case_verdict
from .seqspace import (
    FiniteSeq,
    MembershipVerdict,
    SpaceSpec,
    partial_norms,
    truncated_norms,
)

CONVERGES = "converges"
DIVERGES_SERIES = "diverges"

DEFAULT_WITNESS_LENGTH = 2 ** 14


class WitnessError(ValueError):
    """The requested inclusion is not certified by the oracle."""


@dataclass(frozen=True)
class PowerLog:
    """``a_n = (n + shift)^{-beta} (1 + log_base(n + shift))^{-delta}``, n >= 1."""

    beta: float
    delta: float
    base: float = math.e
    shift: int = 0

    def log_values(self, n) -> np.ndarray:
        m = np.asarray(n, dtype=np.float64) + self.shift
        lg = np.log(m) / math.log(self.base)
        return -self.beta * np.log(m) - self.delta * np.log1p(lg)

    def values(self, length: int, start: int = 1) -> np.ndarray:
        n = np.arange(start, start + length, dtype=np.float64)
        return np.exp(self.log_values(n))

    def to_dict(self) -> dict:
        return {"beta": self.beta, "delta": self.delta,
                "base": "e" if self.base == math.e else self.base, "shift": self.shift}


def power_log_oracle(beta: float, delta: float, spec: SpaceSpec) -> str:
    """Integral test for ``n^{-beta}(1+ln n)^{-delta}`` in ``spec``.

    Finite p: the series ``sum n^{(r-beta)p-1}(1+ln n)^{(gamma-delta)p}``
    converges iff ``(beta-r)p > 0`` or ``beta == r`` and ``(delta-gamma)p > 1``.
    p = inf: ``sup n^{r-beta}(1+ln n)^{gamma-delta}`` is finite iff
    ``beta > r`` or ``beta == r`` and ``delta >= gamma``.
    """
    gap = beta - spec.r
    if spec.finite_p:
        if gap * spec.p > 0:
            return CONVERGES
        if gap == 0 and (delta - spec.gamma) * spec.p > 1:
            return CONVERGES
        return DIVERGES_SERIES
    if gap > 0 or (gap == 0 and delta >= spec.gamma):
        return CONVERGES
    return DIVERGES_SERIES


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def find_witness(big: SpaceSpec, small: SpaceSpec) -> PowerLog:
    """A power-log sequence in ``big`` but not in ``small``.

    Different r: ``beta`` is the midpoint of the two r values. Equal r: the
    log exponent ``delta`` is placed in the window left between the two
    integral-test thresholds (the divergent endpoint when p differs, the
    midpoint when p agrees). Raises :class:`WitnessError` when ``small`` is
    not strictly inside ``big``.
    """
    if small.r > big.r:
        return PowerLog((big.r + small.r) / 2, 0.0)
    if small.r < big.r:
        raise WitnessError(f"{small.label()} is not contained in {big.label()}")
    lower = big.gamma + _inv(big.p)
    lower_inclusive = not big.finite_p
    upper = small.gamma + _inv(small.p)
    upper_inclusive = small.finite_p
    if lower > upper or (lower == upper and not (lower_inclusive and upper_inclusive)):
        raise WitnessError(f"{small.label()} is not strictly contained in {big.label()}")
    if lower == upper:
        delta = lower
    elif big.p != small.p and upper_inclusive:
        delta = upper
    else:
        delta = (lower + upper) / 2
    return PowerLog(big.r, delta)


_CASE_PARAMS = {
    "a": ("p", "q", "r", "e"),
    "b": ("p", "q", "r"),
    "c": ("p", "r", "e", "gamma", "alpha"),
    "d": ("p", "q", "r", "gamma"),
    "e": ("p", "r", "gamma", "alpha"),
}


@dataclass(frozen=True)
class InclusionCase:
    """One strict inclusion between members of the Lorentz(-Zygmund) scale.

    a: l_{p,r+e} in l_{q,r};          b: l_{p,r} in l_{q,r}, p < q;
    c: l_{p,r+e,gamma} in l_{p,r,alpha};  d: l_{p,r,gamma} in l_{q,r,gamma}, p < q;
    e: l_{p,r,gamma} in l_{p,r,alpha}, alpha < gamma.
    """

    case_id: str
    p: float
    r: float
    q: float | None = None
    e: float | None = None
    gamma: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.case_id not in _CASE_PARAMS:
            raise ValueError(f"unknown inclusion case {self.case_id!r}")
        for name in _CASE_PARAMS[self.case_id]:
            value = getattr(self, name)
            if value is None:
                raise ValueError(f"case {self.case_id} needs parameter {name}")
            if not value > 0:
                raise ValueError(f"parameter {name} must be positive, got {value}")
        if math.isinf(self.r) or (self.e is not None and math.isinf(self.e)):
            raise ValueError("r and e must be finite")
        if self.case_id in ("b", "d") and not self.p < self.q:
            raise ValueError(f"case {self.case_id} needs p < q")
        if self.case_id in ("b", "d") and math.isinf(self.p):
            raise ValueError(f"case {self.case_id} needs finite p")
        if self.case_id == "e" and not self.alpha < self.gamma:
            raise ValueError("case e needs alpha < gamma")

    def spaces(self) -> tuple[SpaceSpec, SpaceSpec]:
        """``(small, big)`` with ``small`` strictly inside ``big``."""
        c, p, q, r = self.case_id, self.p, self.q, self.r
        if c == "a":
            return SpaceSpec.lorentz(p, r + self.e), SpaceSpec.lorentz(q, r)
        if c == "b":
            return SpaceSpec.lorentz(p, r), SpaceSpec.lorentz(q, r)
        if c == "c":
            return SpaceSpec.lz(p, r + self.e, self.gamma), SpaceSpec.lz(p, r, self.alpha)
        if c == "d":
            return SpaceSpec.lz(p, r, self.gamma), SpaceSpec.lz(q, r, self.gamma)
        return SpaceSpec.lz(p, r, self.gamma), SpaceSpec.lz(p, r, self.alpha)

    def to_dict(self) -> dict:
        out = {"case": self.case_id}
        for name in _CASE_PARAMS[self.case_id]:
            value = getattr(self, name)
            out[name] = "inf" if math.isinf(value) else value
        return out


@dataclass(eq=False)
class WitnessReport:
    """A power-log sequence certified to lie in ``in_space`` but not ``not_in_space``."""

    case: InclusionCase | None
    family: PowerLog
    in_space: SpaceSpec
    not_in_space: SpaceSpec
    oracle_verdicts: tuple[str, str]
    numeric_verdicts: tuple[MembershipVerdict, MembershipVerdict]
    length: int

    @property
    def oracle_ok(self) -> bool:
        return self.oracle_verdicts == (CONVERGES, DIVERGES_SERIES)

    @property
    def agrees(self) -> bool:
        inside, outside = self.numeric_verdicts
        return self.oracle_ok and inside.converged and outside.diverging

    def to_dict(self) -> dict:
        return {
            "case": self.case.to_dict() if self.case else None,
            "family": self.family.to_dict(),
            "in_space": self.in_space.to_dict(),
            "not_in_space": self.not_in_space.to_dict(),
            "oracle_verdicts": list(self.oracle_verdicts),
            "numeric_verdicts": [v.to_dict() for v in self.numeric_verdicts],
            "length": self.length,
            "agrees": self.agrees,
        }


def certify_witness(family: PowerLog, big: SpaceSpec, small: SpaceSpec,
                    length: int = DEFAULT_WITNESS_LENGTH,
                    case: InclusionCase | None = None) -> WitnessReport:
    oracle = (power_log_oracle(family.beta, family.delta, big),
              power_log_oracle(family.beta, family.delta, small))
    if oracle != (CONVERGES, DIVERGES_SERIES):
        raise WitnessError(
            f"oracle rejects beta={family.beta}, delta={family.delta} as a witness of "
            f"{small.label()} in {big.label()}: {oracle}")
    values = FiniteSeq.of(family.values(length))
    numeric = (truncated_norms(values, big), truncated_norms(values, small))
    return WitnessReport(case, family, big, small, oracle, numeric, length)


def witness_sequence(case: InclusionCase, length: int = DEFAULT_WITNESS_LENGTH) -> WitnessReport:
    """Certified witness for ``case``: oracle on both sides, truncated norms as cross-check."""
    small, big = case.spaces()
    family = find_witness(big, small)
    return certify_witness(family, big, small, length, case)


# --------------------------------------------------------------------------
# the indicator 1_N


def ones_norm(spec: SpaceSpec, n: int) -> float:
    """``||(1, ..., 1, 0, ...)||`` with ``n`` ones."""
    if n < 1:
        raise ValueError("N must be >= 1")
    return float(partial_norms(np.ones(n), spec)[-1])


def ones_norms(spec: SpaceSpec, Ns) -> np.ndarray:
    partials = partial_norms(np.ones(int(max(Ns))), spec)
    return partials[np.asarray(Ns, dtype=np.int64) - 1]


def ones_limit_constant(s1: SpaceSpec, s2: SpaceSpec) -> float:
    """Limit of ``||1_N||_{s1} / ||1_N||_{s2}`` when r agrees: ``(r p2)^{1/p2} / (r p1)^{1/p1}``.

    Each ``||1_N||_{l_{p,r}}`` behaves like ``N^r / (r p)^{1/p}``.
    """
    return (s2.r * s2.p) ** (1 / s2.p) / (s1.r * s1.p) ** (1 / s1.p)


def ones_ratio_profile(s1: SpaceSpec, s2: SpaceSpec, Ns) -> RatioProfile:
    """``||1_N||_{s1} / ||1_N||_{s2}`` on the grid with a three-way verdict."""
    for s in (s1, s2):
        if s.kind != "lorentz" or not s.finite_p:
            raise ValueError("ones_ratio_profile expects finite-p Lorentz specs")
    Ns = np.asarray(sorted(set(int(n) for n in Ns)), dtype=np.int64)
    ratios = ones_norms(s1, Ns) / ones_norms(s2, Ns)
    verdict, slope = three_case_verdict(Ns, ratios)
    limit = float(ratios[-1]) if verdict == BOUNDED else None
    extras = {"s1": s1.to_dict(), "s2": s2.to_dict()}
    if s1.r == s2.r:
        extras["predicted_limit"] = ones_limit_constant(s1, s2)
    return RatioProfile(Ns, ratios, verdict, slope, limit=limit,
                        predicted_rate=s1.r - s2.r, evidence="slope", extras=extras)


def polya_szego_ratio(alpha: float, n: int) -> float:
    """``sum_{k<=N} k^alpha / N^{alpha+1}``; tends to ``1/(alpha+1)``."""
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if n < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(1, n + 1, dtype=np.float64)
    return math.fsum(np.exp(alpha * (np.log(k) - math.log(n)))) / n


# --------------------------------------------------------------------------
# hypotheses on error sequences


def convexity_check(seq, tol: float = 1e-12) -> bool:
    """Non-increasing with non-negative second differences (relative tolerance)."""
    a = FiniteSeq.of(seq).values
    if a.size < 2:
        return True
    slack = tol * float(a.max()) if a.size else 0.0
    if np.any(a[1:] - a[:-1] > slack):
        return False
    if a.size < 3:
        return True
    return bool(np.all(a[:-2] - 2 * a[1:-1] + a[2:] >= -slack))


@dataclass
class DoublingReport:
    """``sup_{n<=N} eps_n / eps_{2n}`` and the ratio at ``n = N``."""

    sup: float
    tail: float
    argmax: int
    bounded: bool
    ratios: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"sup": self.sup, "tail": self.tail, "argmax": self.argmax, "bounded": self.bounded}


def doubling_check(family: PowerLog | Callable, n: int, tol: float = 1e-9) -> DoublingReport:
    """Estimate ``sup eps_n/eps_{2n}`` over ``1 <= n <= N``.

    ``family`` is a :class:`PowerLog` (evaluated in log space) or a callable
    mapping an index array to values. The estimate is reported bounded when
    the sup over the second half of the range does not exceed the sup over
    the first half.
    """
    idx = np.arange(1, n + 1, dtype=np.float64)
    if isinstance(family, PowerLog):
        ratios = np.exp(family.log_values(idx) - family.log_values(2 * idx))
    else:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            ratios = np.asarray(family(idx), dtype=np.float64) / np.asarray(family(2 * idx),
                                                                          dtype=np.float64)
    ratios = np.where(np.isnan(ratios), np.inf, ratios)
    sup = float(np.max(ratios))
    half = max(n // 2, 1)
    first = float(np.max(ratios[:half]))
    second = float(np.max(ratios[half:])) if n > 1 else first
    bounded = math.isfinite(sup) and second <= first * (1 + tol)
    return DoublingReport(sup, float(ratios[-1]), int(np.argmax(ratios)) + 1, bounded, ratios)
