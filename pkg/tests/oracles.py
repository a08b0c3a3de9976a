"""Independent reference computations used by the tests.

Nothing here imports approxlab: each oracle recomputes its quantity from
first principles (high-precision sums, linear programming, characteristic
polynomials, exhaustive grids).
"""
import itertools
import math

import mpmath
import numpy as np
from scipy.optimize import linprog

mpmath.mp.dps = 40


def power_sum(alpha, n):
    """sum_{k=1}^N k^alpha via Hurwitz zeta: zeta(-alpha) - zeta(-alpha, N+1)."""
    s = -mpmath.mpf(alpha)
    if s == 1:
        return mpmath.harmonic(n)
    return mpmath.zeta(s) - mpmath.zeta(s, n + 1)


def weighted_norm(values, p, r, gamma=0):
    """[sum n^{rp-1} (1+ln n)^{gamma p} (a*_n)^p]^{1/p} in 40-digit arithmetic."""
    a = sorted((mpmath.mpf(v) for v in values), reverse=True)
    p, r, gamma = mpmath.mpf(p), mpmath.mpf(r), mpmath.mpf(gamma)
    total = mpmath.fsum(mpmath.mpf(n) ** (r * p - 1) * (1 + mpmath.log(n)) ** (gamma * p) * v ** p
                        for n, v in enumerate(a, start=1))
    return total ** (1 / p)


def series_converges(beta, delta, p, r, gamma=0.0):
    """Integral test for sum n^{(r-beta)p-1} (1+ln n)^{(gamma-delta)p} by substitution.

    With u = ln x the integral becomes int e^{(r-beta)p u} (1+u)^{(gamma-delta)p} du.
    """
    a = (r - beta) * p
    b = (gamma - delta) * p
    if a != 0:
        return a < 0
    return b < -1


def k_l1linf_lp(x, t):
    """inf_y ||x - y||_1 + t ||y||_inf as a linear program in (y, u, s)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    # variables: y (n), u (n) with u >= |x - y|, s >= |y_i|
    c = np.concatenate([np.zeros(n), np.ones(n), [t]])
    rows, rhs = [], []
    for i in range(n):
        e = np.zeros(2 * n + 1)
        e[i], e[n + i] = -1, -1
        rows.append(e.copy()); rhs.append(-x[i])        # x - y <= u
        e[i] = 1
        rows.append(e.copy()); rhs.append(x[i])         # y - x <= u
        f = np.zeros(2 * n + 1)
        f[i], f[2 * n] = 1, -1
        rows.append(f.copy()); rhs.append(0.0)          # y <= s
        f[i] = -1
        rows.append(f); rhs.append(0.0)                 # -y <= s
    bounds = [(None, None)] * n + [(0, None)] * (n + 1)
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    assert res.success
    return float(res.fun)


def k_brute_force(norm_x, norm_y, x, t, points=21, rounds=150):
    """Grid-refinement minimisation of ||x - y||_X + t||y||_Y for dim <= 3.

    ``norm_x`` and ``norm_y`` act row-wise on 2-d arrays.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    f = lambda ys: norm_x(x - ys) + t * norm_y(ys)
    starts = np.array([np.zeros(d), x])
    centre = starts[int(np.argmin(f(starts)))]
    half = 2.0 * max(np.max(np.abs(x)), 1.0)
    axis = np.linspace(-1.0, 1.0, points)
    grid = np.array(list(itertools.product(axis, repeat=d)))
    best = math.inf
    for _ in range(rounds):
        # the grid contains the centre, so the best value never increases
        cands = centre + half * grid
        vals = f(cands)
        i = int(np.argmin(vals))
        best = float(vals[i])
        centre = cands[i]
        half *= 0.8
    return best


def k_l1linf_integral(x, t):
    """int_0^t int_0^s x*(u) du ds in closed form (piecewise quadratic)."""
    xs = sorted((abs(v) for v in x), reverse=True)
    total = 0.0
    head = 0.0  # K at the start of the current unit interval
    s = 0.0
    for v in xs:
        step = min(1.0, t - s)
        if step <= 0:
            break
        total += head * step + v * step * step / 2
        head += v * step
        s += step
    if t > s:
        total += head * (t - s)
    return total


def singular_values_charpoly(t):
    """Square roots of the eigenvalues of T^T T from its characteristic polynomial."""
    t = [[mpmath.mpf(v) for v in row] for row in np.asarray(t, dtype=float)]
    m = mpmath.matrix(t)
    g = m.T * m
    n = g.rows
    if n == 2:
        coeffs = [1, -(g[0, 0] + g[1, 1]), mpmath.det(g)]
    elif n == 3:
        tr = g[0, 0] + g[1, 1] + g[2, 2]
        minors = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0] + g[0, 0] * g[2, 2] - g[0, 2] * g[2, 0]
                  + g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1])
        coeffs = [1, -tr, minors, -mpmath.det(g)]
    else:
        raise ValueError("2x2 or 3x3 only")
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
    lam = sorted((max(mpmath.re(r), 0) for r in roots), reverse=True)
    return [float(mpmath.sqrt(v)) for v in lam]


def _sphere(theta, phi):
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def _refine(f, lo, hi, points=61, rounds=30, maximise=False):
    """Zooming grid search of f over the box [lo, hi] (1-d or 2-d)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    sign = -1.0 if maximise else 1.0
    best_x, best = None, math.inf
    centre = (lo + hi) / 2
    half = (hi - lo) / 2
    for _ in range(rounds):
        axes = [np.linspace(c - h, c + h, points) for c, h in zip(centre, half)]
        for pt in itertools.product(*axes):
            v = sign * f(np.array(pt))
            if v < best:
                best, best_x = v, np.array(pt)
        centre = best_x
        half = half * 0.35
    return sign * best


def best_rank_k_distance(t, k):
    """min over rank-<=k S of ||T - S||_2, via min over (n-k)-dim subspaces V of
    max_{x in V, |x|=1} ||T x|| (a rank-k S vanishes on some such V, and S = T P
    attains the bound)."""
    t = np.asarray(t, dtype=float)
    n = t.shape[1]
    norm_tx = lambda x: float(np.linalg.norm(t @ x))
    circle = lambda a: np.array([math.cos(a), math.sin(a)])
    if n == 2:
        if k == 0:
            return _refine(lambda a: norm_tx(circle(a[0])), [0], [math.pi], maximise=True)
        if k == 1:
            return _refine(lambda a: norm_tx(circle(a[0])), [0], [math.pi])
        return 0.0
    if n == 3:
        if k == 0:
            return _refine(lambda a: norm_tx(_sphere(*a)), [0, 0], [math.pi, 2 * math.pi],
                           points=41, maximise=True)
        if k == 2:
            return _refine(lambda a: norm_tx(_sphere(*a)), [0, 0], [math.pi, 2 * math.pi],
                           points=41)
        if k == 1:
            def worst_in_plane(angles):
                w = _sphere(*angles)
                # orthonormal basis of the plane orthogonal to w
                helper = np.array([1.0, 0, 0]) if abs(w[0]) < 0.9 else np.array([0, 1.0, 0])
                e1 = np.cross(w, helper)
                e1 /= np.linalg.norm(e1)
                e2 = np.cross(w, e1)
                # max over the circle of ||T(cos a e1 + sin a e2)||: top singular value of
                # the 3x2 block, from its 2x2 Gram matrix in closed form
                b = t @ np.column_stack([e1, e2])
                g = b.T @ b
                tr, det = g[0, 0] + g[1, 1], g[0, 0] * g[1, 1] - g[0, 1] ** 2
                return math.sqrt((tr + math.sqrt(max(tr * tr / 4 - det, 0.0)) * 2) / 2)
            return _refine(worst_in_plane, [0, 0], [math.pi, 2 * math.pi], points=41)
        return 0.0
    raise ValueError("2x2 or 3x3 only")
