"""Pure-Python/numpy implementations of the hot kernels.

These are the reference fallback for :mod:`approxlab._ckernels`; both expose
the same four functions with the same signatures.
"""
import math

import numpy as np


def cumulative_sum(terms):
    """Running sums of ``terms`` (float64 array)."""
    return np.cumsum(np.asarray(terms, dtype=np.float64))


EPS = float(np.finfo(np.float64).eps)


def jacobi_sweeps(a, tol, max_sweeps):
    """One-sided (Hestenes) Jacobi orthogonalisation of the columns of ``a``.

    Works in place on a float64 copy. Returns ``(w, v, sweeps)`` where
    ``w = a @ v`` has mutually orthogonal columns and ``v`` is orthogonal.
    The column norms of ``w`` are the singular values.
    """
    w = np.array(a, dtype=np.float64, order="F", copy=True)
    n = w.shape[1]
    v = np.eye(n)
    # inner products below this are rounding noise between (numerically) null columns
    floor = w.size * (EPS * float(np.sum(w * w))) ** 2 if w.size else 0.0
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                wi = w[:, i]
                wj = w[:, j]
                alpha = float(wi @ wi)
                beta = float(wj @ wj)
                gamma = float(wi @ wj)
                if abs(gamma) <= max(tol * math.sqrt(alpha * beta), floor):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wi_new = c * wi - s * wj
                w[:, j] = s * wi + c * wj
                w[:, i] = wi_new
                vi = v[:, i].copy()
                v[:, i] = c * vi - s * v[:, j]
                v[:, j] = s * vi + c * v[:, j]
        if not rotated:
            break
    return w, v, sweeps


def lipschitz_envelopes(xs, fs, lip):
    """Lower and upper ``lip``-Lipschitz envelopes of the samples ``fs``.

    ``lower[i] = min_j fs[j] + lip*|xs[i]-xs[j]|`` and
    ``upper[i] = max_j fs[j] - lip*|xs[i]-xs[j]|``, by two linear passes.
    """
    xs = np.asarray(xs, dtype=np.float64)
    fs = np.asarray(fs, dtype=np.float64)
    n = len(xs)
    lower = fs.copy()
    upper = fs.copy()
    for i in range(1, n):
        step = lip * (xs[i] - xs[i - 1])
        lower[i] = min(lower[i], lower[i - 1] + step)
        upper[i] = max(upper[i], upper[i - 1] - step)
    for i in range(n - 2, -1, -1):
        step = lip * (xs[i + 1] - xs[i])
        lower[i] = min(lower[i], lower[i + 1] + step)
        upper[i] = max(upper[i], upper[i + 1] - step)
    return lower, upper


def pair_barrier(xs, fs, c):
    """``max_{i<j} (|fs[j]-fs[i]| - 2c) / (xs[j]-xs[i])`` over strictly increasing ``xs``."""
    xs = np.asarray(xs, dtype=np.float64)
    fs = np.asarray(fs, dtype=np.float64)
    best = -math.inf
    for i in range(len(xs) - 1):
        dx = xs[i + 1:] - xs[i]
        df = np.abs(fs[i + 1:] - fs[i]) - 2.0 * c
        with np.errstate(over="ignore"):  # near-coincident nodes give an infinite slope
            best = max(best, float(np.max(df / dx)))
    return best
