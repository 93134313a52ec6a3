"""Seeded synthetic cluster generators for histograms, positive measures,
correlation matrices and SPD matrices.

Every generator takes an integer seed and draws from
``numpy.random.default_rng(seed)`` (PCG64), so a given seed reproduces the
dataset exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import invwishart

from .errors import DegenerateDraw, GeometryError
from .simplex_core import points_to_csv


@dataclass(frozen=True)
class SimplexClusterSpec:
    k: int = 3
    n: int = 50
    d: int = 9
    sigma: float = 0.5
    noise: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if not self.n >= self.k >= 1:
            raise GeometryError("need n >= k >= 1")
        if self.sigma < 0:
            raise GeometryError("sigma must be non-negative")
        if self.d < 1:
            raise GeometryError("d must be at least 1")
        if self.noise not in ("gaussian", "student5"):
            raise GeometryError(f"noise must be 'gaussian' or 'student5', not {self.noise!r}")


@dataclass
class LabeledDataset:
    points: np.ndarray
    labels: np.ndarray
    spec: dict = field(default_factory=dict)
    kind: str = "simplex"

    @property
    def k(self) -> int:
        return int(self.labels.max())

    def sidecar(self) -> dict:
        return {"kind": self.kind, "labels": [int(x) for x in self.labels], "spec": self.spec}

    def write(self, points_path, sidecar_path=None) -> None:
        """Points as CSV (or JSON matrices), labels and spec in a JSON sidecar."""
        points_path = Path(points_path)
        if self.kind == "matrix":
            points_path.write_text(json.dumps(
                {"matrices": self.points.tolist(), "labels": [int(x) for x in self.labels],
                 "spec": self.spec}))
            return
        points_path.write_text(points_to_csv(self.points))
        sidecar_path = Path(sidecar_path or points_path.with_suffix(".json"))
        sidecar_path.write_text(json.dumps(self.sidecar(), indent=2))


def balanced_labels(n: int, k: int) -> np.ndarray:
    """1-based labels with cluster sizes differing by at most one."""
    return np.arange(n) % k + 1


def _noise(rng, spec: SimplexClusterSpec, shape) -> np.ndarray:
    if spec.noise == "student5":
        return rng.standard_t(5, size=shape)
    return rng.standard_normal(shape)


def gen_simplex_clusters(spec: SimplexClusterSpec) -> LabeledDataset:
    """Clusters around uniform centers, perturbed in log space and renormalized."""
    rng = np.random.default_rng(spec.seed)
    centers = rng.dirichlet(np.ones(spec.d + 1), size=spec.k)
    labels = balanced_labels(spec.n, spec.k)
    logits = np.log(centers[labels - 1]) + spec.sigma * _noise(rng, spec, (spec.n, spec.d + 1))
    logits -= logits.max(axis=1, keepdims=True)
    pts = np.exp(logits)
    pts /= pts.sum(axis=1, keepdims=True)
    if spec.sigma == 0:
        pts = centers[labels - 1].copy()
    return LabeledDataset(pts, labels, asdict(spec), "simplex")


def gen_positive_measures(spec: SimplexClusterSpec, shape: float = 10.0,
                          scale: float = 0.1) -> LabeledDataset:
    """Simplex clusters, each point rescaled by an independent Gamma draw."""
    base = gen_simplex_clusters(spec)
    # a child stream keeps the simplex part identical to gen_simplex_clusters
    rng = np.random.default_rng([spec.seed, 1])
    mass = rng.gamma(shape, scale, size=spec.n)
    info = dict(base.spec, gamma_shape=shape, gamma_scale=scale)
    return LabeledDataset(base.points * mass[:, None], base.labels, info, "cone")


def _correlation(S: np.ndarray) -> np.ndarray:
    inv_sd = 1.0 / np.sqrt(np.diagonal(S, axis1=-2, axis2=-1))
    C = S * inv_sd[..., :, None] * inv_sd[..., None, :]
    C = 0.5 * (C + np.swapaxes(C, -1, -2))
    idx = np.arange(S.shape[-1])
    C[..., idx, idx] = 1.0
    return C


def _is_pd(M) -> bool:
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return True


def _invwishart(rng, scale, df, size, max_redraws=100):
    draws = invwishart.rvs(df=df, scale=scale, size=size, random_state=rng)
    draws = np.asarray(draws).reshape(size, *np.shape(scale))
    redraws = 0
    for i in range(size):
        while not (np.all(np.isfinite(draws[i])) and _is_pd(draws[i])):
            redraws += 1
            if redraws > max_redraws:
                raise DegenerateDraw("inverse-Wishart draws keep coming out singular")
            draws[i] = invwishart.rvs(df=df, scale=scale, random_state=rng)
    return draws, redraws


def gen_elliptope_clusters(k: int = 3, n: int = 100, d: int = 3, nu1: float = 4.0,
                           nu2: float = 30.0, seed: int = 0) -> LabeledDataset:
    """Correlation-matrix clusters from nested inverse-Wishart draws.

    Each cluster draws a scale ``P ~ W^-1(I, nu1)`` and members
    ``S ~ W^-1(P, nu2)``; members are projected onto the elliptope by
    ``diag(S)^-1/2 S diag(S)^-1/2``.
    """
    if not (nu1 > d - 1 and nu2 > d - 1):
        raise GeometryError(f"inverse-Wishart needs degrees of freedom > {d - 1}")
    rng = np.random.default_rng(seed)
    labels = balanced_labels(n, k)
    out = np.empty((n, d, d))
    redraws = 0
    for c in range(1, k + 1):
        P, r0 = _invwishart(rng, np.eye(d), nu1, 1)
        members = np.flatnonzero(labels == c)
        S, r1 = _invwishart(rng, P[0], nu2, members.size)
        redraws += r0 + r1
        out[members] = _correlation(S)
    spec = {"k": k, "n": n, "d": d, "nu1": nu1, "nu2": nu2, "seed": seed, "redraws": redraws}
    return LabeledDataset(out, labels, spec, "matrix")


def random_orthonormal(rng, d: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix via sign-corrected QR."""
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def gen_psd_clusters(k: int = 5, n: int = 250, d: int = 2, gamma_shape: float = 2.0,
                     gamma_scale: float = 1.0, sigma: float = 0.1, seed: int = 0,
                     eigen: str = "cluster") -> LabeledDataset:
    """SPD clusters ``Q_c diag(L) Q_c^T + sigma A_i A_i^T``.

    ``Q_c`` is shared within a cluster and ``A_i`` has iid standard normal
    entries.  The Gamma eigenvalues ``L`` are drawn once per cluster by
    default (``eigen="cluster"``), so the noise term is the only
    within-cluster spread; ``eigen="point"`` draws them per matrix.
    """
    if sigma < 0 or gamma_shape <= 0 or gamma_scale <= 0:
        raise GeometryError("need sigma >= 0 and positive gamma parameters")
    if eigen not in ("cluster", "point"):
        raise GeometryError(f"eigen must be 'cluster' or 'point', not {eigen!r}")
    rng = np.random.default_rng(seed)
    labels = balanced_labels(n, k)
    Qs = np.stack([random_orthonormal(rng, d) for _ in range(k)])
    if eigen == "cluster":
        L = rng.gamma(gamma_shape, gamma_scale, size=(k, d))[labels - 1]
    else:
        L = rng.gamma(gamma_shape, gamma_scale, size=(n, d))
    A = rng.standard_normal((n, d, d))
    Q = Qs[labels - 1]
    P = (Q * L[:, None, :]) @ np.swapaxes(Q, -1, -2) + sigma * A @ np.swapaxes(A, -1, -2)
    P = 0.5 * (P + np.swapaxes(P, -1, -2))
    spec = {"k": k, "n": n, "d": d, "gamma_shape": gamma_shape, "gamma_scale": gamma_scale,
            "sigma": sigma, "seed": seed, "eigen": eigen}
    return LabeledDataset(P, labels, spec, "matrix")
