# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: point-to-set distances and the geodesic walk.

Metric codes match ``_pykernels``: 0 Hilbert, 1 FHR, 2 L1, 3 Euclidean,
4 KL on the mixture line, 5 KL on the exponential line.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, acos, asin, sin, exp, fabs, pow

cnp.import_array()

cdef enum:
    HILBERT = 0
    FHR = 1
    L1 = 2
    EUC = 3
    KL_ETA = 4
    KL_THETA = 5


cdef double _dist(const double* x, const double* y, Py_ssize_t d, int code) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, lo = 1e308, hi = -1e308, t
    if code == HILBERT:
        # extremes of the ratio first, so only two logs per pair
        for i in range(d):
            t = x[i] / y[i]
            if t > hi:
                hi = t
            if t < lo:
                lo = t
        return log(hi) - log(lo)
    elif code == FHR:
        # chord form, exact zero for equal inputs
        for i in range(d):
            t = sqrt(x[i]) - sqrt(y[i])
            acc += t * t
        acc = 0.5 * sqrt(acc)
        if acc > 1.0:
            acc = 1.0
        return 4.0 * asin(acc)
    elif code == L1:
        for i in range(d):
            acc += fabs(x[i] - y[i])
        return acc
    elif code == EUC:
        for i in range(d):
            t = x[i] - y[i]
            acc += t * t
        return sqrt(acc)
    else:
        for i in range(d):
            acc += x[i] * log(x[i] / y[i])
        return acc if acc > 0.0 else 0.0


def one_to_many(double[:, ::1] X, double[::1] y, int code):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _dist(&X[i, 0], &y[0], d, code)
    return out


def pairwise(double[:, ::1] X, double[:, ::1] Y, int code):
    cdef Py_ssize_t n = X.shape[0], m = Y.shape[0], d = X.shape[1], i, j
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(m):
                o[i, j] = _dist(&X[i, 0], &Y[j, 0], d, code)
    return out


cdef void _line_point(const double* c, const double* p, double s, Py_ssize_t d,
                      int code, double* out) noexcept nogil:
    cdef Py_ssize_t i
    cdef double tot = 0.0, mx = -1e308
    if code == KL_THETA:
        for i in range(d):
            out[i] = (1.0 - s) * log(c[i]) + s * log(p[i])
            if out[i] > mx:
                mx = out[i]
        for i in range(d):
            out[i] = exp(out[i] - mx)
            tot += out[i]
        for i in range(d):
            out[i] /= tot
    else:
        for i in range(d):
            out[i] = (1.0 - s) * c[i] + s * p[i]


cdef void _cut(double* c, const double* p, double alpha, Py_ssize_t d, int code,
               double tol, int max_iter, double* work) noexcept nogil:
    """Overwrite ``c`` with the point of the c->p geodesic at fraction alpha."""
    cdef Py_ssize_t i
    cdef double rmax = -1e308, rmin = 1e308, r, R, s, theta, st, wa, wb, tot
    cdef double full, target, lo, hi, f
    cdef int it
    if code == HILBERT:
        for i in range(d):
            r = p[i] / c[i]
            if r > rmax:
                rmax = r
            if r < rmin:
                rmin = r
        if rmax <= rmin:
            return
        R = pow(rmax / rmin, alpha)
        s = (R - 1.0) / ((rmax - 1.0) - R * (rmin - 1.0))
        for i in range(d):
            c[i] = (1.0 - s) * c[i] + s * p[i]
    elif code == FHR:
        tot = 0.0
        for i in range(d):
            tot += sqrt(c[i] * p[i])
        if tot > 1.0:
            tot = 1.0
        theta = acos(tot)
        if theta < 1e-12:
            for i in range(d):
                c[i] = (1.0 - alpha) * c[i] + alpha * p[i]
            return
        st = sin(theta)
        wa = sin((1.0 - alpha) * theta) / st
        wb = sin(alpha * theta) / st
        tot = 0.0
        for i in range(d):
            r = wa * sqrt(c[i]) + wb * sqrt(p[i])
            c[i] = r * r
            tot += c[i]
        for i in range(d):
            c[i] /= tot
    elif code == L1 or code == EUC:
        for i in range(d):
            c[i] = (1.0 - alpha) * c[i] + alpha * p[i]
    else:
        full = _dist(c, p, d, KL_ETA)
        if full <= 0.0:
            return
        target = alpha * full
        lo = 0.0
        hi = 1.0
        s = alpha
        for it in range(max_iter):
            s = 0.5 * (lo + hi)
            _line_point(c, p, s, d, code, work)
            f = _dist(c, work, d, KL_ETA)
            if fabs(f - target) <= tol * full:
                break
            if f < target:
                lo = s
            else:
                hi = s
        _line_point(c, p, s, d, code, work)
        for i in range(d):
            c[i] = work[i]


def cut(double[::1] c, double[::1] p, double alpha, int code,
        double tol=1e-9, int max_iter=200):
    cdef Py_ssize_t d = c.shape[0]
    out = np.array(c, copy=True)
    work = np.empty(d)
    cdef double[::1] o = out
    cdef double[::1] w = work
    _cut(&o[0], &p[0], alpha, d, code, tol, max_iter, &w[0])
    return out


def walk_center(double[:, ::1] X, int code, int T, Py_ssize_t start,
                double tol=1e-9, int max_iter=200):
    """Geodesic walk ``c_t = c_{t-1} #_{1/(t+1)} farthest(c_{t-1})``."""
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, far
    cdef double best, dist
    cdef int t
    center = np.array(X[start], copy=True)
    work = np.empty(d)
    cdef double[::1] c = center
    cdef double[::1] w = work
    with nogil:
        for t in range(1, T + 1):
            far = 0
            best = -1.0
            for i in range(n):
                dist = _dist(&X[i, 0], &c[0], d, code)
                if dist > best:
                    best = dist
                    far = i
            if best <= 0.0:
                break
            _cut(&c[0], &X[far, 0], 1.0 / (t + 1.0), d, code, tol, max_iter, &w[0])
    return center
