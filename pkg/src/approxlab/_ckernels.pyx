# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contract as :mod:`approxlab._pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.float cimport DBL_EPSILON
from libc.math cimport sqrt, fabs, copysign, INFINITY

cnp.import_array()


def cumulative_sum(terms):
    """Running sums of ``terms`` with Neumaier compensation."""
    cdef double[::1] t = np.ascontiguousarray(terms, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s = 0.0, comp = 0.0, x, tmp
    for i in range(n):
        x = t[i]
        tmp = s + x
        if fabs(s) >= fabs(x):
            comp += (s - tmp) + x
        else:
            comp += (x - tmp) + s
        s = tmp
        o[i] = s + comp
    return out


def jacobi_sweeps(a, double tol, int max_sweeps):
    """One-sided Jacobi orthogonalisation; returns ``(w, v, sweeps)``."""
    w_arr = np.array(a, dtype=np.float64, order="F", copy=True)
    cdef double[::1, :] w = w_arr
    cdef Py_ssize_t m = w.shape[0], n = w.shape[1]
    v_arr = np.asfortranarray(np.eye(n))
    cdef double[::1, :] v = v_arr
    cdef Py_ssize_t i, j, k
    cdef int sweeps = 0, sweep
    cdef bint rotated
    cdef double alpha, beta, gamma, zeta, t, c, s, xi, xj
    cdef double floor = 0.0
    for k in range(m):
        for j in range(n):
            floor += w[k, j] * w[k, j]
    floor = m * n * (DBL_EPSILON * floor) * (DBL_EPSILON * floor)
    for sweep in range(1, max_sweeps + 1):
        sweeps = sweep
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for k in range(m):
                    alpha += w[k, i] * w[k, i]
                    beta += w[k, j] * w[k, j]
                    gamma += w[k, i] * w[k, j]
                if fabs(gamma) <= tol * sqrt(alpha * beta) or fabs(gamma) <= floor:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = copysign(1.0, zeta) / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    xi = w[k, i]
                    xj = w[k, j]
                    w[k, i] = c * xi - s * xj
                    w[k, j] = s * xi + c * xj
                for k in range(n):
                    xi = v[k, i]
                    xj = v[k, j]
                    v[k, i] = c * xi - s * xj
                    v[k, j] = s * xi + c * xj
        if not rotated:
            break
    return w_arr, v_arr, sweeps


def lipschitz_envelopes(xs, fs, double lip):
    """Lower/upper ``lip``-Lipschitz envelopes of sampled values."""
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    lower_arr = np.array(fs, dtype=np.float64, copy=True)
    upper_arr = lower_arr.copy()
    cdef double[::1] lo = lower_arr
    cdef double[::1] up = upper_arr
    cdef Py_ssize_t n = x.shape[0], i
    cdef double step
    for i in range(1, n):
        step = lip * (x[i] - x[i - 1])
        if lo[i - 1] + step < lo[i]:
            lo[i] = lo[i - 1] + step
        if up[i - 1] - step > up[i]:
            up[i] = up[i - 1] - step
    for i in range(n - 2, -1, -1):
        step = lip * (x[i + 1] - x[i])
        if lo[i + 1] + step < lo[i]:
            lo[i] = lo[i + 1] + step
        if up[i + 1] - step > up[i]:
            up[i] = up[i + 1] - step
    return lower_arr, upper_arr


def pair_barrier(xs, fs, double c):
    """Max over ordered pairs of ``(|df| - 2c)/dx``."""
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] f = np.ascontiguousarray(fs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double best = -INFINITY, val
    for i in range(n - 1):
        for j in range(i + 1, n):
            val = (fabs(f[j] - f[i]) - 2.0 * c) / (x[j] - x[i])
            if val > best:
                best = val
    return best
