"""Pure numpy versions of the compiled kernels, used when the extension is
not built.  Same signatures and metric codes as ``_ckernels``."""

import numpy as np

HILBERT, FHR, L1, EUC, KL_ETA, KL_THETA = range(6)


def _dist(X, y, code):
    if code == HILBERT:
        t = np.log(X) - np.log(y)
        return t.max(axis=-1) - t.min(axis=-1)
    if code == FHR:
        chord = np.sqrt(((np.sqrt(X) - np.sqrt(y)) ** 2).sum(axis=-1))
        return 4.0 * np.arcsin(np.minimum(0.5 * chord, 1.0))
    if code == L1:
        return np.abs(X - y).sum(axis=-1)
    if code == EUC:
        return np.sqrt(((X - y) ** 2).sum(axis=-1))
    return np.maximum((X * (np.log(X) - np.log(y))).sum(axis=-1), 0.0)


def one_to_many(X, y, code):
    return _dist(np.asarray(X, dtype=float), np.asarray(y, dtype=float), code)


def pairwise(X, Y, code):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return np.stack([_dist(X, y, code) for y in Y], axis=1)


def _line_point(c, p, s, code):
    if code == KL_THETA:
        z = (1.0 - s) * np.log(c) + s * np.log(p)
        w = np.exp(z - z.max())
        return w / w.sum()
    return (1.0 - s) * c + s * p


def cut(c, p, alpha, code, tol=1e-9, max_iter=200):
    c = np.array(c, dtype=float)
    p = np.asarray(p, dtype=float)
    if code == HILBERT:
        r = p / c
        rmax, rmin = r.max(), r.min()
        if rmax <= rmin:
            return c
        R = (rmax / rmin) ** alpha
        s = (R - 1.0) / ((rmax - 1.0) - R * (rmin - 1.0))
        return (1.0 - s) * c + s * p
    if code == FHR:
        theta = np.arccos(min(float(np.sqrt(c * p).sum()), 1.0))
        if theta < 1e-12:
            return (1.0 - alpha) * c + alpha * p
        st = np.sin(theta)
        v = (np.sin((1.0 - alpha) * theta) / st) * np.sqrt(c) + (np.sin(alpha * theta) / st) * np.sqrt(p)
        v = v * v
        return v / v.sum()
    if code in (L1, EUC):
        return (1.0 - alpha) * c + alpha * p
    full = float(_dist(c, p, KL_ETA))
    if full <= 0.0:
        return c
    target = alpha * full
    lo, hi, s = 0.0, 1.0, alpha
    for _ in range(max_iter):
        s = 0.5 * (lo + hi)
        f = float(_dist(c, _line_point(c, p, s, code), KL_ETA))
        if abs(f - target) <= tol * full:
            break
        if f < target:
            lo = s
        else:
            hi = s
    return _line_point(c, p, s, code)


def walk_center(X, code, T, start, tol=1e-9, max_iter=200):
    X = np.asarray(X, dtype=float)
    c = X[start].copy()
    for t in range(1, T + 1):
        dist = _dist(X, c, code)
        far = int(np.argmax(dist))
        if dist[far] <= 0.0:
            break
        c = cut(c, X[far], 1.0 / (t + 1.0), code, tol, max_iter)
    return c
