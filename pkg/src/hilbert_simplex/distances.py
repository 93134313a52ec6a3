"""Dissimilarities between histograms on the open simplex and the cone.

Every function accepts point objects or plain arrays and broadcasts over
leading axes, so ``rho_hilbert(X, y)`` with ``X`` of shape ``(n, D)``
returns the ``n`` distances from the rows of ``X`` to ``y``.  Scalar
results are returned as Python floats.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DimensionMismatch, GeometryError, PointOutsidePolytope


class SimplexMetricKind(enum.Enum):
    FHR = "fhr"
    KL = "kl"
    REVERSE_KL = "rkl"
    SYM_KL = "skl"
    HILBERT = "hilbert"
    L1 = "l1"
    TV = "tv"
    EUCLIDEAN = "euc"
    CAUCHY_SCHWARZ = "cs"
    FUNK = "funk"
    REVERSE_FUNK = "rfunk"


def _pair(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1:] != q.shape[-1:]:
        raise DimensionMismatch(f"dimensions differ: {p.shape[-1:]} vs {q.shape[-1:]}")
    return p, q


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def rho_fhr(p, q):
    """Fisher-Hotelling-Rao distance ``2 arccos(sum sqrt(p q))``.

    Evaluated as ``4 arcsin(|sqrt p - sqrt q| / 2)``, which is the same angle
    on the unit sphere but has no cancellation near ``p = q``.
    """
    p, q = _pair(p, q)
    chord = np.sqrt(((np.sqrt(p) - np.sqrt(q)) ** 2).sum(axis=-1))
    return _out(4.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0)))


def rho_kl(p, q):
    """Kullback-Leibler divergence of ``p`` from ``q``."""
    p, q = _pair(p, q)
    return _out(np.maximum((p * (np.log(p) - np.log(q))).sum(axis=-1), 0.0))


def rho_kl_variants(p, q, kind: str = "reverse"):
    """``kind`` is ``"reverse"`` or ``"symmetrized"``."""
    kind = kind.lower()
    if kind in ("reverse", "rkl"):
        return rho_kl(q, p)
    if kind in ("symmetrized", "sym", "skl"):
        p, q = _pair(p, q)
        return _out(((p - q) * (np.log(p) - np.log(q))).sum(axis=-1))
    raise GeometryError(f"unknown KL variant {kind!r}")


def rho_ext_kl(p, q, kind: str = "forward"):
    """Extended KL on positive measures: forward, reverse or symmetrized."""
    p, q = _pair(p, q)
    kind = kind.lower()
    if kind in ("reverse", "rekl"):
        p, q = q, p
    elif kind in ("symmetrized", "sym", "sekl"):
        return _out(((p - q) * (np.log(p) - np.log(q))).sum(axis=-1))
    elif kind not in ("forward", "ekl"):
        raise GeometryError(f"unknown extended KL variant {kind!r}")
    val = (p * (np.log(p) - np.log(q)) + q - p).sum(axis=-1)
    return _out(np.maximum(val, 0.0))


def rho_l1(p, q):
    p, q = _pair(p, q)
    return _out(np.abs(p - q).sum(axis=-1))


def rho_tv(p, q):
    p, q = _pair(p, q)
    return _out(0.5 * np.abs(p - q).sum(axis=-1))


def rho_euclidean(p, q):
    p, q = _pair(p, q)
    return _out(np.sqrt(((p - q) ** 2).sum(axis=-1)))


def rho_cauchy_schwarz(p, q):
    """Projective Cauchy-Schwarz divergence; scaling either input is a no-op."""
    p, q = _pair(p, q)
    pq = (p * q).sum(axis=-1)
    pp = (p * p).sum(axis=-1)
    qq = (q * q).sum(axis=-1)
    ratio = np.clip(pq / np.sqrt(pp * qq), 0.0, 1.0)
    return _out(-np.log(ratio))


def rho_hilbert(p, q):
    """Hilbert simplex distance as the variation norm of log differences."""
    p, q = _pair(p, q)
    diff = np.log(p) - np.log(q)
    return _out(diff.max(axis=-1) - diff.min(axis=-1))


def rho_birkhoff(p, q):
    """Birkhoff projective distance between rays of the positive orthant.

    Identical in form to :func:`rho_hilbert`; the variation norm ignores the
    normalization, which is exactly the projective invariance.
    """
    return rho_hilbert(p, q)


def rho_funk(p, q):
    """Funk weak metric ``log max_i p_i / q_i`` (forward direction p -> q).

    Non-negative on the simplex, zero iff ``p == q``; ``rho_funk(p, q) +
    rho_funk(q, p) == rho_hilbert(p, q)``.
    """
    p, q = _pair(p, q)
    return _out(np.maximum((np.log(p) - np.log(q)).max(axis=-1), 0.0))


def rho_reverse_funk(p, q):
    return rho_funk(q, p)


def line_clip_params(p, q):
    """Boundary parameters of the line ``(1 - t) p + t q`` through the simplex.

    Returns ``(t0, t1)`` with ``t0 <= 0`` the largest exit parameter behind
    ``p`` and ``t1 >= 1`` the smallest one beyond ``q``.  Both are infinite
    when ``p == q``.
    """
    p, q = _pair(p, q)
    if p.ndim != 1 or q.ndim != 1:
        raise GeometryError("line clipping takes a single pair of 1-D points")
    t0, t1 = -np.inf, np.inf
    for a, b in zip(p.tolist(), q.tolist()):
        if a != b:
            t = a / (a - b)
            if t0 < t <= 0:
                t0 = t
            elif 1 <= t < t1:
                t1 = t
    return t0, t1


def rho_hilbert_crossratio(p, q) -> float:
    """Hilbert distance from the log cross-ratio of the clipped line.

    O(d) scan over the facets ``x_i = 0``.  Retained as an independent
    check of :func:`rho_hilbert`.
    """
    t0, t1 = line_clip_params(p, q)
    if t0 == -np.inf or t1 == np.inf:
        return 0.0
    if t0 == 0 or t1 == 1:
        return float("inf")
    # log(1 - 1/t) computed with log1p keeps nearby points accurate
    return float(abs(np.log1p(-1.0 / t0) - np.log1p(-1.0 / t1)))


def rho_funk_crossratio(p, q) -> float:
    """Funk distance ``-log(1 - 1/t1)`` read off the clipped line."""
    _, t1 = line_clip_params(p, q)
    if t1 == np.inf:
        return 0.0
    if t1 == 1:
        return float("inf")
    return float(-np.log1p(-1.0 / t1))


class PolytopeHalfspaces:
    """Open polytope ``{x : A x + b > 0}`` given by ``m`` affine functionals."""

    def __init__(self, coefficients, offsets):
        A = np.array(coefficients, dtype=float)
        b = np.array(offsets, dtype=float)
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise GeometryError("coefficients must be (m, D) with m offsets")
        m, dim = A.shape
        if m < dim + 1:
            raise GeometryError(f"a bounded polytope in R^{dim} needs >= {dim + 1} facets, got {m}")
        A.setflags(write=False)
        b.setflags(write=False)
        self.coefficients = A
        self.offsets = b

    @property
    def dim(self) -> int:
        return self.coefficients.shape[1]

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"point has {x.shape[-1]} coordinates, polytope lives in R^{self.dim}")
        return x @ self.coefficients.T + self.offsets

    @classmethod
    def standard_simplex(cls, d: int) -> "PolytopeHalfspaces":
        """Chart ``x = (p_1..p_d)`` of the simplex: ``x_i > 0`` and ``1 - sum x > 0``."""
        A = np.vstack([np.eye(d), -np.ones((1, d))])
        b = np.concatenate([np.zeros(d), [1.0]])
        return cls(A, b)

    @classmethod
    def box(cls, lower, upper) -> "PolytopeHalfspaces":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        d = lower.size
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([-lower, upper])
        return cls(A, b)


def rho_polytope_hilbert(x, y, H: PolytopeHalfspaces) -> float:
    """Hilbert distance in a polytope from its facet functionals."""
    lx = H.evaluate(x)
    ly = H.evaluate(y)
    if np.any(lx <= 0) or np.any(ly <= 0):
        raise PointOutsidePolytope("both points must satisfy every L_i > 0")
    diff = np.log(lx) - np.log(ly)
    return _out(diff.max(axis=-1) - diff.min(axis=-1))


def kappa_contraction(M) -> float:
    """Birkhoff contraction ratio of a positive matrix.

    ``(sqrt(a) - 1) / (sqrt(a) + 1)`` with ``a`` the largest cross ratio
    ``M[i,k] M[j,l] / (M[j,k] M[i,l])``.
    """
    M = np.asarray(M, dtype=float)
    if np.any(M <= 0):
        raise GeometryError("contraction ratio needs a strictly positive matrix")
    logM = np.log(M)
    # max over (i, j, k, l) of (logM[i,k] - logM[j,k]) - (logM[i,l] - logM[j,l])
    rows = logM[:, None, :] - logM[None, :, :]
    log_a = float((rows.max(axis=-1) - rows.min(axis=-1)).max())
    sa = np.exp(0.5 * log_a)
    return float((sa - 1.0) / (sa + 1.0))


SIMPLEX_FUNCTIONS = {
    "fhr": rho_fhr,
    "kl": rho_kl,
    "rkl": lambda p, q: rho_kl_variants(p, q, "reverse"),
    "skl": lambda p, q: rho_kl_variants(p, q, "symmetrized"),
    "hilbert": rho_hilbert,
    "l1": rho_l1,
    "tv": rho_tv,
    "euc": rho_euclidean,
    "cs": rho_cauchy_schwarz,
    "funk": rho_funk,
    "rfunk": rho_reverse_funk,
}

CONE_FUNCTIONS = {
    "birkhoff": rho_birkhoff,
    "ekl": lambda p, q: rho_ext_kl(p, q, "forward"),
    "rekl": lambda p, q: rho_ext_kl(p, q, "reverse"),
    "sekl": lambda p, q: rho_ext_kl(p, q, "symmetrized"),
}
