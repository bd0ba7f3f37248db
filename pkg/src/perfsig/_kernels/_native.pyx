# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: hot inner loops of similarity scoring and CUSUM scans.

Mirrors fallback.py exactly; see that module for the semantics contract.
"""

import numpy as np

from libc.math cimport sqrt

BACKEND = "native"


def mean_std(x):
    cdef const double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double m = 0.0, acc = 0.0, d
    for i in range(n):
        m += v[i]
    m /= n
    for i in range(n):
        d = v[i] - m
        acc += d * d
    return m, sqrt(acc / n)


def znorm(x):
    cdef const double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double m, s
    m, s = mean_std(v)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    if s == 0.0:
        out.fill(np.nan)
        return out, m, s
    for i in range(n):
        o[i] = (v[i] - m) / s
    return out, m, s


def euclidean_distance(a, b):
    cdef const double[::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0, d
    for i in range(n):
        d = x[i] - y[i]
        acc += d * d
    return sqrt(acc)


def pearson(a, b):
    cdef const double[::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double mx = 0.0, my = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0, dx, dy, denom
    for i in range(n):
        mx += x[i]
        my += y[i]
    mx /= n
    my /= n
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        sxy += dx * dy
        sxx += dx * dx
        syy += dy * dy
    denom = sqrt(sxx) * sqrt(syy)
    if denom == 0.0:
        return float("nan")
    return sxy / denom


def cosine(a, b):
    cdef const double[::1] x = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double sxy = 0.0, sxx = 0.0, syy = 0.0, denom
    for i in range(n):
        sxy += x[i] * y[i]
        sxx += x[i] * x[i]
        syy += y[i] * y[i]
    denom = sqrt(sxx) * sqrt(syy)
    if denom == 0.0:
        return float("nan")
    return sxy / denom


def cusum_scan(x, double target_mean, double slack, double limit):
    cdef const double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    upper = np.zeros(n, dtype=np.float64)
    lower = np.zeros(n, dtype=np.float64)
    cdef double[::1] u = upper
    cdef double[::1] l = lower
    cdef double hi, lo
    violations = []
    for i in range(1, n):
        hi = u[i - 1] + v[i] - target_mean - slack
        u[i] = hi if hi > 0.0 else 0.0
        lo = l[i - 1] + v[i] - target_mean + slack
        l[i] = lo if lo < 0.0 else 0.0
    for i in range(n):
        if u[i] > limit or l[i] < -limit:
            violations.append(i + 1)
    return upper, lower, violations
