"""Backend selection for the hot loops.

The Cython extension is used when it was built; otherwise, or when the
environment variable ``HILBERT_SIMPLEX_PURE`` is set to a non-empty value
other than ``0``, the numpy implementation is loaded.  ``BACKEND`` names the
active one.
"""

import os

import numpy as np

from . import _pykernels

HILBERT, FHR, L1, EUC, KL_ETA, KL_THETA = range(6)

if os.environ.get("HILBERT_SIMPLEX_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def one_to_many(X, y, code: int) -> np.ndarray:
    """Distances ``D(X[i] : y)`` for every row of ``X``."""
    return _impl.one_to_many(_c(X), _c(y), code)


def pairwise(X, Y, code: int) -> np.ndarray:
    return _impl.pairwise(_c(X), _c(Y), code)


def cut(c, p, alpha: float, code: int, tol: float = 1e-9, max_iter: int = 200) -> np.ndarray:
    return _impl.cut(_c(c), _c(p), float(alpha), code, tol, max_iter)


def walk_center(X, code: int, T: int, start: int, tol: float = 1e-9, max_iter: int = 200) -> np.ndarray:
    return _impl.walk_center(_c(X), code, int(T), int(start), tol, max_iter)
