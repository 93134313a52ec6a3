"""Projective and divergence geometry of SPD matrices and the elliptope.

The production distances all go through the generalized eigenvalues of a
pair ``(A, B)``, i.e. the spectrum of ``A^{-1} B``, obtained by whitening
with the Cholesky factor of ``A``.  Functions broadcast over a leading
stack axis so clustering can evaluate one center against many matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateLine,
    DimensionMismatch,
    FactorizationFailure,
    GeometryError,
    NotCorrelation,
    NotPositiveDefinite,
    NotSymmetric,
)
from .simplex_core import Tolerance, format_number


class SpdMatrix:
    """Symmetric positive-definite matrix, checked by a Cholesky attempt."""

    __slots__ = ("entries",)

    def __init__(self, entries, sym_tol: float = 1e-12):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise GeometryError(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max()))
        if not np.all(np.isfinite(a)):
            raise GeometryError("matrix entries must be finite")
        if np.abs(a - a.T).max() > sym_tol * scale:
            raise NotSymmetric("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        try:
            np.linalg.cholesky(a)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("matrix is not positive definite") from None
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.entries.tolist()})"


class CorrelationMatrix(SpdMatrix):
    """SPD matrix with unit diagonal: a point of the open elliptope."""

    __slots__ = ()

    def __init__(self, entries, tol: float = 1e-12):
        super().__init__(entries)
        if np.abs(np.diag(self.entries) - 1.0).max() > tol:
            raise NotCorrelation("diagonal entries must all equal 1")

    @classmethod
    def from_covariance(cls, sigma) -> "CorrelationMatrix":
        s = np.asarray(sigma, dtype=float)
        inv_sd = 1.0 / np.sqrt(np.diag(s))
        c = s * inv_sd[:, None] * inv_sd[None, :]
        np.fill_diagonal(c, 1.0)
        return cls(0.5 * (c + c.T))


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise GeometryError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _pair(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[-2:] != B.shape[-2:] or A.shape[-1] != A.shape[-2]:
        raise DimensionMismatch(f"matrix shapes differ: {A.shape[-2:]} vs {B.shape[-2:]}")
    return A, B


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def generalized_eigenvalues(A, B) -> np.ndarray:
    """Ascending eigenvalues of ``A^{-1} B`` for SPD ``A`` and ``B``.

    With ``A = L L^T`` the spectrum equals that of the symmetric matrix
    ``L^{-1} B L^{-T}``, so only a symmetric eigensolve is needed.
    """
    A, B = _pair(A, B)
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise FactorizationFailure("first matrix is not numerically positive definite") from None
    Linv = np.linalg.inv(L)
    W = Linv @ B @ np.swapaxes(Linv, -1, -2)
    W = 0.5 * (W + np.swapaxes(W, -1, -2))
    return np.linalg.eigvalsh(W)


def _log_gev(A, B) -> np.ndarray:
    lam = generalized_eigenvalues(A, B)
    if np.any(lam <= 0):
        raise FactorizationFailure("second matrix is not positive definite")
    return np.log(lam)


def rho_birkhoff_psd(A, B):
    """Birkhoff projective distance ``log(lambda_max / lambda_min)`` of ``A^{-1} B``."""
    lg = _log_gev(A, B)
    return _out(lg[..., -1] - lg[..., 0])


def rho_hilbert_elliptope(C1, C2):
    """Hilbert distance of the elliptope; same spectral formula on correlation matrices."""
    return rho_birkhoff_psd(C1, C2)


def rho_birkhoff_matrix(X, Y) -> float:
    """Spectral Birkhoff formula for arbitrary invertible ``X``, ``Y``.

    Uses the (possibly nonsymmetric) product ``X^{-1} Y``; only meaningful
    when that product has a real positive spectrum, e.g. for congruent
    images ``A C B`` of SPD matrices.
    """
    X, Y = _pair(X, Y)
    lam = np.linalg.eigvals(np.linalg.solve(X, Y))
    if np.abs(lam.imag).max() > 1e-8 * np.abs(lam).max() or np.any(lam.real <= 0):
        raise GeometryError("X^-1 Y has no real positive spectrum")
    lg = np.log(lam.real)
    return float(lg.max() - lg.min())


def rho_thompson(A, B):
    """Thompson metric ``max_i |log lambda_i(A^{-1} B)|``."""
    lg = _log_gev(A, B)
    return _out(np.maximum(lg[..., -1], -lg[..., 0]))


def rho_funk_matrix(A, B):
    """Funk weak metric ``log inf{beta : A <= beta B} = log lambda_max(B^{-1} A)``.

    Can be negative; the symmetrization ``F(A, B) + F(B, A)`` is the Birkhoff
    distance.
    """
    lg = _log_gev(B, A)
    return _out(lg[..., -1])


def rho_logdet(A, B):
    """Log-det divergence ``tr(A B^{-1}) - log det(A B^{-1}) - d``.

    Returns the divergence itself; Gaussian KL is half of it, and the
    "square root of log-det" baseline is its square root.
    """
    lg = _log_gev(B, A)
    lam = np.exp(lg)
    return _out(np.maximum((lam - lg - 1.0).sum(axis=-1), 0.0))


def rho_sqrt_logdet(A, B):
    return _out(np.sqrt(np.asarray(rho_logdet(A, B))))


def rho_kl_gaussian(A, B):
    """KL divergence between ``N(0, A)`` and ``N(0, B)``."""
    return _out(0.5 * np.asarray(rho_logdet(A, B)))


def rho_frobenius(A, B):
    A, B = _pair(A, B)
    return _out(np.sqrt(((A - B) ** 2).sum(axis=(-2, -1))))


def rho_entrywise_l1(A, B):
    A, B = _pair(A, B)
    return _out(np.abs(A - B).sum(axis=(-2, -1)))


def _is_pd(M) -> bool:
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return True


def _boundary_bracket(C1, D, direction: float, width_tol: float, max_iter: int):
    """Bracket the exit parameter of ``C1 + s D`` along ``direction`` (+1 or -1).

    Returns ``(inside, outside)`` parameters in units of ``|s|``, with the
    matrix positive definite at ``inside`` and not at ``outside``.
    """
    inside, step = 0.0, 1.0
    while _is_pd(C1 + direction * step * D):
        inside = step
        step *= 2.0
        if step > 1e300:
            raise DegenerateLine("line does not leave the cone")
    outside = step
    for _ in range(max_iter):
        if outside - inside <= width_tol * max(1.0, inside):
            break
        mid = 0.5 * (inside + outside)
        if _is_pd(C1 + direction * mid * D):
            inside = mid
        else:
            outside = mid
    return inside, outside


def hilbert_elliptope_bisection(C1, C2, tol: Tolerance | None = None,
                                width_tol: float = 1e-8) -> IntervalEstimate:
    """Bracket the elliptope Hilbert distance by bisecting for the boundary.

    Walks the line ``(1 - t) C1 + t C2`` outward in both directions, using a
    Cholesky attempt as the membership test, until inside and outside
    parameters agree to ``width_tol`` (relative).  Since a smaller domain
    gives a larger Hilbert distance, the inside points give the upper bound
    and the outside points the lower bound.
    """
    tol = tol or Tolerance(max_iter=200)
    C1, C2 = _pair(C1, C2)
    D = C2 - C1
    if np.abs(D).max() == 0.0:
        raise DegenerateLine("C1 and C2 coincide")
    # the +1 side is measured from C2 so that t_hi - 1 keeps its precision
    in_hi, out_hi = _boundary_bracket(C2, D, 1.0, width_tol, tol.max_iter)
    in_lo, out_lo = _boundary_bracket(C1, D, -1.0, width_tol, tol.max_iter)
    upper = float(np.log1p(1.0 / in_hi) + np.log1p(1.0 / in_lo))
    lower = float(np.log1p(1.0 / out_hi) + np.log1p(1.0 / out_lo))
    return IntervalEstimate(lower, upper)


# -- serialization ---------------------------------------------------------


def read_matrices_json(source, kind: type = SpdMatrix) -> list:
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text())
    else:
        data = json.load(source)
    if isinstance(data, dict):
        data = data["matrices"]
    out = []
    for i, m in enumerate(data, start=1):
        try:
            out.append(kind(m))
        except GeometryError as exc:
            raise type(exc)(f"matrix {i}: {exc}") from None
    return out


def read_matrices_csv(source, kind: type = SpdMatrix) -> list:
    """Blocks of CSV rows separated by blank lines, one block per matrix."""
    text = Path(source).read_text() if isinstance(source, (str, Path)) else source.read()
    blocks, current = [], []
    for line in text.splitlines():
        if line.strip():
            current.append([float(c) for c in line.split(",") if c.strip()])
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    out = []
    for i, b in enumerate(blocks, start=1):
        try:
            out.append(kind(b))
        except GeometryError as exc:
            raise type(exc)(f"matrix {i}: {exc}") from None
    return out


def matrices_to_csv(mats) -> str:
    chunks = []
    for m in mats:
        rows = np.asarray(m, dtype=float)
        chunks.append("\n".join(",".join(format_number(x) for x in r) for r in rows))
    return "\n\n".join(chunks) + "\n"


def write_matrices_json(path, mats) -> None:
    Path(path).write_text(json.dumps([np.asarray(m, dtype=float).tolist() for m in mats]))
