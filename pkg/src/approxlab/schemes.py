"""Approximation schemes with computable error sequences.

Three concrete schemes, each exposing ``E(x, A_n)`` for ``n = 0, 1, ..., N``
with the convention ``A_0 = {0}`` so that ``E(x, A_0) = ||x||``:

* :class:`HilbertScheme` - spans of the first ``n`` orthonormal coordinates;
  errors are tail norms and any non-increasing error profile can be realised
  exactly (:func:`prescribe_errors`).
* :class:`MatrixScheme` - square matrices under the spectral norm, ``A_n`` the
  matrices of rank at most ``n``; errors are singular values.
* :class:`DiagonalScheme` - diagonal operators on Hilbert sequence space,
  whose approximation numbers are the sorted moduli of the diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .seqspace import FiniteSeq

MAX_MATRIX_DIM = 64
MAX_HILBERT_DIM = 2 ** 16

JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 60
IDEMPOTENCY_TOL = 1e-8
RANK_RTOL = 1e-10


class SchemeError(ValueError):
    """Element or request incompatible with the scheme."""


@dataclass(frozen=True)
class HilbertScheme:
    """Nested coordinate spans ``A_n = span(e_0, ..., e_{n-1})`` in R^{n_max}."""

    n_max: int = MAX_HILBERT_DIM

    def __post_init__(self):
        if self.n_max < 1:
            raise SchemeError("n_max must be >= 1")

    def element(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size > self.n_max:
            raise SchemeError(f"vector of length {x.size} exceeds budget {self.n_max}")
        if not np.all(np.isfinite(x)):
            raise SchemeError("vector entries must be finite")
        return x

    def errors(self, x, n: int) -> np.ndarray:
        x = self.element(x)
        if n > self.n_max:
            raise SchemeError(f"N={n} exceeds budget {self.n_max}")
        out = np.zeros(n + 1)
        m = min(x.size, n + 1)
        # running hypot keeps tails accurate where squares would under- or overflow
        tails = np.hypot.accumulate(np.abs(x[::-1]))[::-1] if x.size else x
        out[:m] = tails[:m]
        return out

    def unit_vector(self, k: int) -> np.ndarray:
        if not 0 <= k < self.n_max:
            raise SchemeError(f"index {k} outside 0..{self.n_max - 1}")
        e = np.zeros(k + 1)
        e[k] = 1.0
        return e


def _check_matrix(t, max_dim: int) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 2:
        raise SchemeError("expected a 2-d matrix")
    if max(t.shape) > max_dim:
        raise SchemeError(f"matrix of shape {t.shape} exceeds dimension cap {max_dim}")
    if not np.all(np.isfinite(t)):
        raise SchemeError("matrix entries must be finite")
    return t


@dataclass(frozen=True, eq=False)
class MatrixScheme:
    """Spectral-norm approximation by matrices of rank at most ``n``."""

    operator: np.ndarray | None = None
    max_dim: int = MAX_MATRIX_DIM

    def __post_init__(self):
        if self.operator is not None:
            object.__setattr__(self, "operator", _check_matrix(self.operator, self.max_dim))

    def errors(self, t, n: int) -> np.ndarray:
        t = self.operator if t is None else _check_matrix(t, self.max_dim)
        if t is None:
            raise SchemeError("no matrix supplied")
        sv = singular_values(t, self.max_dim).values
        out = np.zeros(n + 1)
        m = min(sv.size, n + 1)
        out[:m] = sv[:m]
        return out


@dataclass(frozen=True, eq=False)
class DiagonalScheme:
    """Diagonal operator ``D e_k = d_k e_k``; ``a_n(D) = d*_n``."""

    diagonal: FiniteSeq | None = None

    def __post_init__(self):
        if self.diagonal is not None:
            d = np.abs(np.asarray(getattr(self.diagonal, "values", self.diagonal), dtype=np.float64))
            object.__setattr__(self, "diagonal", FiniteSeq.of(d))

    def errors(self, d, n: int) -> np.ndarray:
        if d is None:
            if self.diagonal is None:
                raise SchemeError("no diagonal supplied")
            d = self.diagonal.values
        d = np.abs(np.asarray(getattr(d, "values", d), dtype=np.float64).ravel())
        if not np.all(np.isfinite(d)):
            raise SchemeError("diagonal entries must be finite")
        srt = np.sort(d)[::-1]
        out = np.zeros(n + 1)
        m = min(srt.size, n + 1)
        out[:m] = srt[:m]
        return out


def prescribe_errors(eps, scheme: HilbertScheme | None = None) -> np.ndarray:
    """Coordinates ``x`` with ``E(x, A_k) = eps_k`` for every listed ``k``.

    ``x_k = sqrt(eps_k^2 - eps_{k+1}^2)``, with the term after the last entry
    taken as 0. A trailing zero in ``eps`` is therefore absorbed: ``(1, 1/2, 0)``
    and ``(1, 1/2)`` give the same two coordinates.
    """
    e = np.asarray(getattr(eps, "values", eps), dtype=np.float64).ravel()
    if e.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(e)) or e.min() < 0:
        raise SchemeError("errors must be finite and non-negative")
    if np.any(e[1:] > e[:-1]):
        k = int(np.argmax(e[1:] > e[:-1]))
        raise SchemeError(f"errors must be non-increasing (eps_{k + 1} > eps_{k})")
    if e.size > 1 and e[-1] == 0.0:
        e = e[:-1]
    scheme = scheme or HilbertScheme(max(e.size, 1))
    if e.size > scheme.n_max:
        raise SchemeError(f"{e.size} coordinates exceed budget {scheme.n_max}")
    scale = float(e[0])
    if scale == 0.0:
        return np.zeros(e.size)
    e = e / scale
    nxt = np.append(e[1:], 0.0)
    # (e - nxt)(e + nxt) avoids cancellation when consecutive errors are close
    return scale * np.sqrt((e - nxt) * (e + nxt))


def error_sequence(x, scheme, n: int) -> FiniteSeq:
    """``(E(x, A_0), ..., E(x, A_N))`` in ``scheme``."""
    if n < 0:
        raise SchemeError("N must be >= 0")
    return FiniteSeq.of(scheme.errors(x, n))


def singular_values(t, max_dim: int = MAX_MATRIX_DIM) -> FiniteSeq:
    """Singular values, largest first, by one-sided Jacobi on the columns of ``t``.

    Accepts rectangular input; the number of values returned is ``min(m, k)``.
    """
    t = _check_matrix(t, max_dim)
    if t.size == 0:
        return FiniteSeq.of([])
    # orthogonalise the shorter side
    a = t if t.shape[0] >= t.shape[1] else t.T
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return FiniteSeq.of(np.zeros(a.shape[1]))
    w, _, sweeps = kernels.jacobi_sweeps(np.asarray(a / scale, dtype=np.float64, order="F"),
                                         JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps >= JACOBI_MAX_SWEEPS:
        raise ArithmeticError("Jacobi iteration did not converge")
    sv = np.sort(np.linalg.norm(np.asarray(w), axis=0))[::-1] * scale
    return FiniteSeq.of(sv)


def numerical_rank(sv, rtol: float = RANK_RTOL) -> int:
    sv = np.asarray(getattr(sv, "values", sv))
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def shapiro_gap(scheme, n: int, witness=None) -> float:
    """Certified lower bound for ``E(S(X) ∩ A_{n+1}, A_n)``.

    Hilbert: the unit vector ``e_n`` lies in ``A_{n+1}`` at distance 1 from
    ``A_n``. Diagonal and matrix schemes use a unit-norm element of rank at
    most ``n+1`` (the truncated operator, or ``witness`` when given), whose
    distance to ``A_n`` is its ``(n+1)``-th singular value.
    """
    if n < 0:
        raise SchemeError("n must be >= 0")
    if isinstance(scheme, HilbertScheme):
        e = scheme.unit_vector(n)
        return float(scheme.errors(e, n)[n])
    if witness is not None:
        sv = singular_values(witness).values
        if numerical_rank(sv) > n + 1:
            raise SchemeError(f"witness has rank {numerical_rank(sv)} > {n + 1}")
    elif isinstance(scheme, DiagonalScheme):
        sv = scheme.errors(None, n)
    elif isinstance(scheme, MatrixScheme):
        sv = scheme.errors(None, n)
    else:
        raise SchemeError(f"unsupported scheme {type(scheme).__name__}")
    if sv.size <= n or sv[0] == 0:
        return 0.0
    return float(sv[n] / sv[0])


@dataclass(frozen=True)
class GapBound:
    """``a_n(P/||P||)`` against the lower bound ``1/C^2`` for one projection."""

    n: int
    norm: float
    a_n: float
    bound: float
    margin: float

    def to_dict(self) -> dict:
        return {"n": self.n, "norm": self.norm, "a_n": self.a_n,
                "bound": self.bound, "margin": self.margin}


def projection_gap_check(family, c: float | None = None, ranks=None) -> list[GapBound]:
    """Check ``a_n(P_n/||P_n||) >= 1/C^2`` for projections ``P_n`` of rank ``n``.

    ``ranks`` defaults to ``1, 2, ...`` in list order; ``c`` defaults to the
    largest projection norm in the family. Non-idempotent or wrong-rank
    inputs raise :class:`SchemeError`.
    """
    mats = [_check_matrix(p, MAX_MATRIX_DIM) for p in family]
    ranks = list(ranks) if ranks is not None else list(range(1, len(mats) + 1))
    if len(ranks) != len(mats):
        raise SchemeError("ranks and family differ in length")
    svs = [singular_values(p).values for p in mats]
    norms = [float(sv[0]) if sv.size else 0.0 for sv in svs]
    if c is None:
        c = max(norms) if norms else 1.0
    out = []
    for p, sv, norm, n in zip(mats, svs, norms, ranks):
        if p.shape[0] != p.shape[1]:
            raise SchemeError("projections must be square")
        defect = float(singular_values(p @ p - p).values[0])
        if defect > IDEMPOTENCY_TOL:
            raise SchemeError(f"rank-{n} input is not idempotent: ||P^2 - P|| = {defect:.3e}")
        rank = numerical_rank(sv)
        if rank != n:
            raise SchemeError(f"expected rank {n}, found {rank}")
        if norm > c * (1 + 1e-12):
            raise SchemeError(f"||P|| = {norm:.6g} exceeds C = {c:.6g}")
        a_n = float(sv[n - 1] / norm)
        bound = 1.0 / c ** 2
        out.append(GapBound(n, norm, a_n, bound, a_n - bound))
    return out


def oblique_projection(rng: np.random.Generator, m: int, n: int, skew: float) -> np.ndarray:
    """Random rank-``n`` projection on R^m with norm ``sqrt(1 + skew^2)``.

    ``P = Q Q^T + skew * Q u w^T Q_perp^T`` with orthonormal ``Q`` (m x n),
    its orthogonal complement ``Q_perp`` and unit vectors ``u``, ``w``.
    """
    if not 1 <= n <= m:
        raise SchemeError("need 1 <= n <= m")
    basis, _ = np.linalg.qr(rng.standard_normal((m, m)))
    q, q_perp = basis[:, :n], basis[:, n:]
    p = q @ q.T
    if n < m and skew:
        u = rng.standard_normal(n)
        w = rng.standard_normal(m - n)
        p = p + skew * np.outer(q @ (u / np.linalg.norm(u)), q_perp @ (w / np.linalg.norm(w)))
    return p
