"""Norm-ratio profiles: the common output of every separation experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DIVERGES = "diverges"
VANISHES = "vanishes"
BOUNDED = "bounded"
INCONCLUSIVE = "inconclusive"

# divergence rule: ratio above the floor with the predicted slope
DIVERGENCE_FLOOR = 1e3
RATE_RTOL = 0.05
FLAT_SLOPE = 0.02


@dataclass(eq=False)
class RatioProfile:
    """Ratios indexed by truncation N, with a verdict and fitted log-log rate."""

    Ns: np.ndarray
    ratios: np.ndarray
    verdict: str
    fitted_rate: float
    limit: float | None = None
    predicted_rate: float | None = None
    evidence: str = ""
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.Ns = np.asarray(self.Ns, dtype=np.int64)
        self.ratios = np.asarray(self.ratios, dtype=np.float64)
        if len(self.Ns) != len(self.ratios):
            raise ValueError("Ns and ratios must have equal length")

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if len(self.ratios) else math.nan

    def to_dict(self) -> dict:
        return {
            "Ns": self.Ns.tolist(),
            "ratios": self.ratios.tolist(),
            "verdict": self.verdict,
            "fitted_rate": self.fitted_rate,
            "limit": self.limit,
            "predicted_rate": self.predicted_rate,
            "max_ratio": self.max_ratio,
            "evidence": self.evidence,
            **self.extras,
        }

    def csv_rows(self):
        return [("N", "ratio")] + [(int(n), float(r)) for n, r in zip(self.Ns, self.ratios)]


def fit_rate(Ns, ratios) -> float:
    """Log-log slope of ``ratios`` against ``Ns`` over the last decade of the grid."""
    Ns = np.asarray(Ns, dtype=np.float64)
    ratios = np.asarray(ratios, dtype=np.float64)
    if len(Ns) < 2:
        return math.nan
    sel = Ns >= Ns.max() / 10
    if sel.sum() < 2:
        sel = np.zeros(len(Ns), dtype=bool)
        sel[-2:] = True
    x = np.log(Ns[sel])
    y = np.log(ratios[sel])
    if np.ptp(x) == 0:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def three_case_verdict(Ns, ratios, flat: float = FLAT_SLOPE):
    """``diverges`` / ``vanishes`` / ``bounded`` from the sign of the fitted slope."""
    slope = fit_rate(Ns, ratios)
    if slope > flat:
        return DIVERGES, slope
    if slope < -flat:
        return VANISHES, slope
    return BOUNDED, slope


def divergence_verdict(Ns, ratios, predicted: float | None,
                       floor: float = DIVERGENCE_FLOOR, rtol: float = RATE_RTOL):
    """The profile diverges when it exceeds ``floor`` and its fitted slope
    matches ``predicted`` within ``rtol``. Returns ``(verdict, slope)``;
    ``bounded`` when the ratio is flat, else ``inconclusive``.
    """
    slope = fit_rate(Ns, ratios)
    ratios = np.asarray(ratios, dtype=np.float64)
    if (predicted is not None and predicted > 0 and ratios.max() > floor
            and abs(slope - predicted) <= rtol * predicted):
        return DIVERGES, slope
    if abs(slope) <= FLAT_SLOPE and np.ptp(ratios) <= FLAT_SLOPE * max(ratios.max(), 1.0):
        return BOUNDED, slope
    return INCONCLUSIVE, slope
