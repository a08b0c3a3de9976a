"""Approximation-space quasi-norms and separation experiments.

``||x||_{A(X,S)} = ||(E(x, A_0), E(x, A_1), ...)||_S`` with the error at
``A_{n-1}`` placed in position ``n`` of the sequence-space norm. Separation
experiments produce :class:`~approxlab.profile.RatioProfile` objects whose
divergence shows that two such quasi-norms are not equivalent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .profile import (
    BOUNDED,
    DIVERGES,
    INCONCLUSIVE,
    RatioProfile,
    divergence_verdict,
)
from .scales import (
    PowerLog,
    certify_witness,
    convexity_check,
    doubling_check,
    find_witness,
    ones_norm,
)
from .schemes import (
    DiagonalScheme,
    HilbertScheme,
    MatrixScheme,
    SchemeError,
    error_sequence,
    prescribe_errors,
    shapiro_gap,
)
from .seqspace import (
    FiniteSeq,
    MembershipVerdict,
    SpaceSpec,
    norm,
    quasi_triangle_modulus,
    truncated_norms,
)

__all__ = [
    "RatioProfile",
    "approx_norm",
    "approx_norm_value",
    "separate_linear",
    "separate_teo2",
    "corbrud_separation",
    "CorbrudReport",
    "oikhberg_sandwich_check",
    "SandwichReport",
    "approx_quasi_triangle_ratio",
]

MEMBERSHIP_LENGTH = 2 ** 14


def approx_norm(x, scheme, spec: SpaceSpec, n: int) -> MembershipVerdict:
    """Truncated-norm verdict for ``(E(x, A_0), ..., E(x, A_N))`` in ``spec``."""
    return truncated_norms(error_sequence(x, scheme, n), spec)


def approx_norm_value(x, scheme, spec: SpaceSpec, n: int) -> float:
    return norm(error_sequence(x, scheme, n), spec)


def approx_quasi_triangle_ratio(x, y, scheme, spec: SpaceSpec, n: int) -> float:
    """``||x + y|| / (||x|| + ||y||)`` in ``A(X, spec)``; bounded by the modulus of ``spec``
    for schemes with ``A_n + A_n = A_n``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = max(x.size, y.size)
    s = np.zeros(m)
    s[:x.size] += x
    s[:y.size] += y
    denom = approx_norm_value(x, scheme, spec, n) + approx_norm_value(y, scheme, spec, n)
    return approx_norm_value(s, scheme, spec, n) / denom if denom else 0.0


def _grid(Ns) -> np.ndarray:
    Ns = np.asarray(sorted(set(int(v) for v in Ns)), dtype=np.int64)
    if Ns.size == 0 or Ns[0] < 1:
        raise ValueError("Ns must be a non-empty list of positive integers")
    return Ns


def _growth_exponent(family: PowerLog, spec: SpaceSpec) -> float:
    """Power growth exponent of the truncated ``spec`` norm of ``family`` (0 if sub-power)."""
    return max(spec.r - family.beta, 0.0)


def separate_linear(scheme: HilbertScheme, s1: SpaceSpec, s2: SpaceSpec, Ns,
                    membership_length: int = MEMBERSHIP_LENGTH) -> RatioProfile:
    """Profile of ``||y_N||_{A(s2)} / ||y_N||_{A(s1)}`` for ``s2`` strictly inside ``s1``.

    ``y_N`` realises the first ``N`` terms of a power-log witness of
    ``s1 \\ s2`` exactly as its error sequence. The verdict is ``diverges``
    when the rate rule holds (ratio above 1e3 with the predicted log-log
    slope) or, failing that, when the witness is certified divergent in
    ``s2`` and convergent in ``s1`` at ``membership_length`` terms while the
    last quarter of the profile increases; ``evidence`` names which rule decided.
    """
    Ns = _grid(Ns)
    if s1 == s2:
        ratios = np.ones(Ns.size)
        verdict, slope = divergence_verdict(Ns, ratios, None)
        return RatioProfile(Ns, ratios, verdict, slope, limit=1.0, evidence="identical",
                            extras={"s1": s1.to_dict(), "s2": s2.to_dict()})
    family = find_witness(s1, s2)
    report = certify_witness(family, s1, s2, membership_length)
    ratios = np.empty(Ns.size)
    for i, n in enumerate(Ns):
        eps = family.values(int(n))
        y = prescribe_errors(eps, scheme)
        ratios[i] = (approx_norm_value(y, scheme, s2, int(n))
                     / approx_norm_value(y, scheme, s1, int(n)))
    predicted = _growth_exponent(family, s2)
    verdict, slope = divergence_verdict(Ns, ratios, predicted or None)
    evidence = "rate" if verdict == DIVERGES else ""
    if verdict != DIVERGES:
        tail = ratios[-max(ratios.size // 4, 2):]
        increasing = bool(np.all(np.diff(tail) >= 0)) and tail[-1] > tail[0]
        if report.agrees and increasing:
            verdict, evidence = DIVERGES, "membership"
    return RatioProfile(Ns, ratios, verdict, slope, predicted_rate=predicted, evidence=evidence,
                        extras={"s1": s1.to_dict(), "s2": s2.to_dict(),
                                "witness": family.to_dict(),
                                "membership": [v.summary() for v in report.numeric_verdicts]})


def _gap_errors(scheme, n: int) -> np.ndarray:
    """Errors ``E(a_N, A_k)``, k = 0..N, of a unit element of ``A_N`` far from ``A_{N-1}``."""
    if isinstance(scheme, HilbertScheme):
        return error_sequence(scheme.unit_vector(n - 1), scheme, n).values
    if isinstance(scheme, (DiagonalScheme, MatrixScheme)):
        sv = scheme.errors(None, n)
        if sv[0] == 0:
            raise SchemeError("zero operator")
        out = sv / sv[0]
        out[n:] = 0.0
        return out
    raise SchemeError(f"unsupported scheme {type(scheme).__name__}")


def separate_teo2(scheme, s1: SpaceSpec, s2: SpaceSpec, Ns) -> RatioProfile:
    """Profile of ``||a_N||_{A(s1)} / ||a_N||_{A(s2)}`` for the gap elements ``a_N``.

    ``a_N`` is a unit element of ``A_N`` at distance ``c_N`` from ``A_{N-1}``
    (``e_{N-1}`` in the Hilbert scheme, a normalised rank-``N`` truncation for
    operator schemes). Preconditions are checked and recorded in ``extras``:
    the gap ``c = min c_N`` must be positive and ``||1_N||_{s1}/||1_N||_{s2}``
    must grow. Also records whether the lower bound
    ``||a_N||_{A(s1)} >= c ||1_N||_{s1}`` and the upper bound
    ``||a_N||_{A(s2)} <= ||1_N||_{s2}`` hold at every N.
    """
    Ns = _grid(Ns)
    ratios = np.empty(Ns.size)
    gaps = np.empty(Ns.size)
    lower_ok = True
    upper_ok = True
    for i, n in enumerate(Ns):
        errs = _gap_errors(scheme, int(n))
        gaps[i] = shapiro_gap(scheme, int(n) - 1)
        n1 = norm(errs, s1)
        n2 = norm(errs, s2)
        ratios[i] = n1 / n2
        lower_ok &= n1 >= gaps[i] * ones_norm(s1, int(n)) * (1 - 1e-12)
        upper_ok &= n2 <= ones_norm(s2, int(n)) * (1 + 1e-12)
    c = float(gaps.min())
    predicted = s1.r - s2.r
    verdict, slope = divergence_verdict(Ns, ratios, predicted if predicted > 0 else None)
    failures = []
    if not c > 0:
        failures.append("gap constant is not positive")
    if not predicted > 0:
        failures.append("ones ratio does not grow (r1 <= r2)")
    extras = {"s1": s1.to_dict(), "s2": s2.to_dict(), "gap_constant": c,
              "lower_bound_holds": bool(lower_ok), "upper_bound_holds": bool(upper_ok),
              "precondition_failures": failures}
    limit = float(ratios[-1]) if verdict == BOUNDED else None
    return RatioProfile(Ns, ratios, verdict, slope, limit=limit, predicted_rate=predicted,
                        evidence="rate" if verdict == DIVERGES else "", extras=extras)


@dataclass(eq=False)
class CorbrudReport:
    """Outcome of the Lorentz-scale separation for ``A_q^r`` versus ``A_p^r``."""

    r: float
    p: float
    q: float
    n: int
    convex: bool
    doubling_sup: float
    doubling_bounded: bool
    in_q: MembershipVerdict
    in_p: MembershipVerdict
    extras: dict = field(default_factory=dict)

    @property
    def separated(self) -> bool:
        return self.in_q.converged and self.in_p.diverging

    def to_dict(self) -> dict:
        return {"r": self.r, "p": self.p, "q": self.q, "N": self.n, "convex": self.convex,
                "doubling_sup": self.doubling_sup, "doubling_bounded": self.doubling_bounded,
                "in_A_q": self.in_q.to_dict(), "in_A_p": self.in_p.to_dict(),
                "separated": self.separated, **self.extras}


def corbrud_errors(r: float, p: float, n: int) -> np.ndarray:
    """``eps_k = (k+1)^{-r} (1 + ln(k+1))^{-1/p}`` for ``k = 0..N``."""
    return PowerLog(r, 1.0 / p).values(n + 1)


def corbrud_separation(scheme: HilbertScheme, r: float, p: float, q: float,
                       n: int = MEMBERSHIP_LENGTH) -> CorbrudReport:
    """Realise ``eps_k = (k+1)^{-r}(1+ln(k+1))^{-1/p}`` exactly and test membership.

    The element lies in ``A(X, l_{q,r})`` but not in ``A(X, l_{p,r})``.
    """
    if not (r > 0 and 0 < p < q):
        raise ValueError(f"need r > 0 and 0 < p < q, got r={r}, p={p}, q={q}")
    if math.isinf(p):
        raise ValueError("p must be finite")
    eps = corbrud_errors(r, p, n)
    x = prescribe_errors(eps, scheme)
    family = PowerLog(r, 1.0 / p)
    dbl = doubling_check(lambda k: np.exp(family.log_values(k + 1)), n // 2)
    in_q = approx_norm(x, scheme, SpaceSpec.lorentz(q, r), n)
    in_p = approx_norm(x, scheme, SpaceSpec.lorentz(p, r), n)
    bound = 2.0 ** r * 2.0 ** (1.0 / p)
    return CorbrudReport(r, p, q, n, convexity_check(eps), dbl.sup, dbl.bounded, in_q, in_p,
                         extras={"doubling_bound": bound})


@dataclass(eq=False)
class SandwichReport:
    """Per-n check of ``3 eps_{max(1, [n/6])} >= a_n >= eps_n / 9``."""

    a: np.ndarray
    upper_margins: np.ndarray
    lower_margins: np.ndarray

    @property
    def upper_failures(self) -> list[int]:
        return (np.nonzero(self.upper_margins < 0)[0] + 1).tolist()

    @property
    def lower_failures(self) -> list[int]:
        return (np.nonzero(self.lower_margins < 0)[0] + 1).tolist()

    @property
    def holds(self) -> bool:
        return not self.upper_failures and not self.lower_failures

    def to_dict(self) -> dict:
        return {"holds": self.holds, "length": len(self.a),
                "min_upper_margin": float(self.upper_margins.min()),
                "min_lower_margin": float(self.lower_margins.min()),
                "upper_failures": self.upper_failures, "lower_failures": self.lower_failures}


def oikhberg_sandwich_check(eps, t: DiagonalScheme) -> SandwichReport:
    """Compare the approximation numbers of ``t`` with the prescribed ``eps`` (1-based)."""
    e = FiniteSeq.of(eps)
    if not e.sorted_flag:
        raise ValueError("eps must be non-increasing")
    e = e.values
    m = e.size
    a = t.errors(None, m - 1)
    n = np.arange(1, m + 1)
    idx = np.maximum(n // 6, 1) - 1
    upper = 3.0 * e[idx] - a
    lower = a - e / 9.0
    return SandwichReport(a, upper, lower)
