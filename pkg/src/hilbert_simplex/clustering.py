"""Center-based clustering under an arbitrary dissimilarity.

Points are passed as a stacked array: ``(n, D)`` for histograms and cone
vectors, ``(n, d, d)`` for matrices.  Labels in results are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import distances as dist
from . import kernels
from . import matrix_geometry as mg
from .errors import EmptyInput, GeometryError, NotEnoughDistinctPoints, ToleranceNotReached, UnknownMetric


@dataclass(frozen=True)
class Dissimilarity:
    """A broadcasting dissimilarity ``func(X, y)`` plus how to cluster with it.

    ``kernel`` is the compiled-kernel metric code when one exists (simplex
    data only); ``geodesic`` names the curve used by :func:`geodesic_cut`:
    ``"hilbert"`` and ``"segment"`` are straight segments, ``"sphere"`` the
    great circle in square-root coordinates, ``"theta"`` the exponential
    (natural parameter) line.
    """

    name: str
    func: Callable
    symmetric: bool = True
    squared_for_kmeans: bool = False
    kernel: int | None = None
    geodesic: str | None = "segment"

    def __call__(self, x, y):
        return self.func(x, y)

    def to_point(self, X, y) -> np.ndarray:
        """``D(X[i] : y)`` for every row of ``X``."""
        if self.kernel is not None:
            return kernels.one_to_many(X, y, self.kernel)
        return np.asarray(self.func(X, y), dtype=float)

    def seeding(self, X, y) -> np.ndarray:
        d = self.to_point(X, y)
        return d * d if self.squared_for_kmeans else d

    def squared(self) -> "Dissimilarity":
        f = self.func
        return Dissimilarity(
            f"{self.name}^2", lambda x, y: np.square(f(x, y)), self.symmetric,
            False, None, self.geodesic)

    def with_seeding(self, squared: bool) -> "Dissimilarity":
        return replace(self, squared_for_kmeans=squared)

    def with_geodesic(self, geodesic: str) -> "Dissimilarity":
        """Same dissimilarity, cut along another curve (``"segment"`` or ``"theta"``)."""
        kernel = self.kernel
        if kernel in (kernels.KL_ETA, kernels.KL_THETA):
            kernel = kernels.KL_THETA if geodesic == "theta" else kernels.KL_ETA
        elif geodesic != self.geodesic:
            kernel = None
        return replace(self, geodesic=geodesic, kernel=kernel)


_K = kernels

SIMPLEX_METRICS = {
    "hilbert": Dissimilarity("hilbert", dist.rho_hilbert, True, True, _K.HILBERT, "hilbert"),
    "fhr": Dissimilarity("fhr", dist.rho_fhr, True, True, _K.FHR, "sphere"),
    "kl": Dissimilarity("kl", dist.rho_kl, False, False, _K.KL_ETA, "segment"),
    "rkl": Dissimilarity("rkl", dist.SIMPLEX_FUNCTIONS["rkl"], False, False, None, "segment"),
    "skl": Dissimilarity("skl", dist.SIMPLEX_FUNCTIONS["skl"], True, False, None, "segment"),
    "l1": Dissimilarity("l1", dist.rho_l1, True, True, _K.L1, "segment"),
    "tv": Dissimilarity("tv", dist.rho_tv, True, True, None, "segment"),
    "euc": Dissimilarity("euc", dist.rho_euclidean, True, True, _K.EUC, "segment"),
    "cs": Dissimilarity("cs", dist.rho_cauchy_schwarz, True, False, None, "segment"),
    "funk": Dissimilarity("funk", dist.rho_funk, False, False, None, "segment"),
    "rfunk": Dissimilarity("rfunk", dist.rho_reverse_funk, False, False, None, "segment"),
}

CONE_METRICS = {
    "birkhoff": Dissimilarity("birkhoff", dist.rho_birkhoff, True, True, _K.HILBERT, None),
    "ekl": Dissimilarity("ekl", dist.CONE_FUNCTIONS["ekl"], False, False, None, None),
    "rekl": Dissimilarity("rekl", dist.CONE_FUNCTIONS["rekl"], False, False, None, None),
    "sekl": Dissimilarity("sekl", dist.CONE_FUNCTIONS["sekl"], True, False, None, None),
}

MATRIX_METRICS = {
    "hilbert": Dissimilarity("hilbert", mg.rho_hilbert_elliptope, True, True, None, None),
    "birkhoff": Dissimilarity("birkhoff", mg.rho_birkhoff_psd, True, True, None, None),
    "thompson": Dissimilarity("thompson", mg.rho_thompson, True, True, None, None),
    "funk": Dissimilarity("funk", mg.rho_funk_matrix, False, False, None, None),
    "logdet": Dissimilarity("logdet", mg.rho_logdet, False, False, None, None),
    "sqrt_logdet": Dissimilarity("sqrt_logdet", mg.rho_sqrt_logdet, False, True, None, None),
    "kl": Dissimilarity("kl", mg.rho_kl_gaussian, False, False, None, None),
    "rkl": Dissimilarity("rkl", lambda a, b: mg.rho_kl_gaussian(b, a), False, False, None, None),
    "skl": Dissimilarity(
        "skl", lambda a, b: np.add(mg.rho_kl_gaussian(a, b), mg.rho_kl_gaussian(b, a)),
        True, False, None, None),
    "euc": Dissimilarity("euc", mg.rho_frobenius, True, True, None, None),
    "l1": Dissimilarity("l1", mg.rho_entrywise_l1, True, True, None, None),
}

REGISTRIES = {"simplex": SIMPLEX_METRICS, "cone": CONE_METRICS, "matrix": MATRIX_METRICS}


def get_dissimilarity(name: str, domain: str = "simplex") -> Dissimilarity:
    registry = REGISTRIES[domain]
    try:
        return registry[name.lower()]
    except KeyError:
        valid = ", ".join(sorted(registry))
        raise UnknownMetric(f"unknown {domain} metric {name!r}; valid names: {valid}") from None


@dataclass
class ClusteringResult:
    labels: np.ndarray
    centers: np.ndarray
    objective: float
    iterations: int
    seed: int | None = None
    center_indices: list[int] | None = None
    trace: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.centers)

    def to_dict(self) -> dict:
        return {
            "labels": [int(x) for x in self.labels],
            "centers": np.asarray(self.centers).tolist(),
            "objective": float(self.objective),
            "iterations": int(self.iterations),
            "seed": self.seed,
            "center_indices": self.center_indices,
            "trace": [float(x) for x in self.trace],
        }


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _stack(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        X = points.astype(float, copy=False)
    else:
        X = np.stack([np.asarray(p, dtype=float) for p in points])
    if X.shape[0] == 0:
        raise EmptyInput("no points given")
    return X


def _check_k(X: np.ndarray, k: int) -> None:
    if k < 1:
        raise GeometryError("k must be at least 1")
    distinct = np.unique(X.reshape(len(X), -1), axis=0).shape[0]
    if k > distinct:
        raise NotEnoughDistinctPoints(f"k={k} exceeds the {distinct} distinct points")


def distance_table(X: np.ndarray, centers: np.ndarray, D: Dissimilarity) -> np.ndarray:
    """``(n, k)`` table of ``D(X[i] : centers[j])``."""
    return np.stack([D.to_point(X, c) for c in centers], axis=1)


def assign(X: np.ndarray, centers: np.ndarray, D: Dissimilarity) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center labels (0-based) and the matching distances."""
    table = distance_table(X, centers, D)
    labels = table.argmin(axis=1)
    return labels, table[np.arange(len(X)), labels]


def kmeanspp_seed(points, k: int, D: Dissimilarity, rng=None) -> list[int]:
    """k-means++ seeding: uniform first seed, then proportional to ``D(p, C)``.

    Sampling is by inverse CDF on one uniform draw per seed, which keeps the
    sequence reproducible for a given generator state.
    """
    X = _stack(points)
    _check_k(X, k)
    rng = _rng(rng)
    n = len(X)
    chosen = [int(rng.integers(n))]
    weights = D.seeding(X, X[chosen[0]])
    weights[chosen[0]] = 0.0
    while len(chosen) < k:
        cdf = np.cumsum(weights)
        total = cdf[-1]
        if not total > 0:
            raise NotEnoughDistinctPoints("remaining points all have zero dissimilarity to the seeds")
        idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
        idx = min(idx, n - 1)
        while weights[idx] == 0.0:  # guards the u == total edge
            idx -= 1
        chosen.append(idx)
        weights = np.minimum(weights, D.seeding(X, X[idx]))
        weights[chosen] = 0.0
    return chosen


def kmeanspp_cluster(points, k: int, D: Dissimilarity, rng=None, refine_rounds: int = 0,
                     seed: int | None = None) -> ClusteringResult:
    """k-means++ seeds followed by nearest-seed assignment.

    ``objective`` is the mean seeding dissimilarity to the assigned center,
    i.e. the mean squared distance for metrics flagged
    ``squared_for_kmeans`` and the plain divergence otherwise.

    With ``refine_rounds > 0`` each round replaces every center by the medoid
    of its cluster (the member, or the current center, minimizing the summed
    dissimilarity) and reassigns; the energy never increases.
    """
    if rng is None:
        rng = seed
    X = _stack(points)
    idx = kmeanspp_seed(X, k, D, rng)
    centers = X[idx].copy()
    table = np.stack([D.seeding(X, c) for c in centers], axis=1)
    labels = table.argmin(axis=1)
    objective = float(table[np.arange(len(X)), labels].mean())
    trace = [objective]
    rounds = 0
    for _ in range(refine_rounds):
        rounds += 1
        for j in range(k):
            members = np.flatnonzero(labels == j)
            if members.size == 0:
                continue
            # the current center stays a candidate so the energy cannot rise
            cand = np.concatenate([centers[j:j + 1], X[members]])
            best = int(np.argmin([D.seeding(X[members], c).sum() for c in cand]))
            if best > 0:
                centers[j] = cand[best]
                idx[j] = int(members[best - 1])
        table = np.stack([D.seeding(X, c) for c in centers], axis=1)
        new_labels = table.argmin(axis=1)
        objective = float(table[np.arange(len(X)), new_labels].mean())
        trace.append(objective)
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return ClusteringResult(labels + 1, centers, objective, rounds, seed, list(map(int, idx)), trace)


def farthest_first_seed(points, k: int, rho: Dissimilarity, rng=None, first: int | None = None) -> list[int]:
    """Gonzalez farthest-first traversal; ties go to the lowest index."""
    X = _stack(points)
    _check_k(X, k)
    if first is None:
        first = int(_rng(rng).integers(len(X)))
    chosen = [first]
    dmin = rho.to_point(X, X[first])
    dmin[first] = 0.0
    while len(chosen) < k:
        nxt = int(np.argmax(dmin))
        chosen.append(nxt)
        dmin = np.minimum(dmin, rho.to_point(X, X[nxt]))
        dmin[chosen] = 0.0
    return chosen


def kcenter_cost(points, centers, rho: Dissimilarity) -> float:
    """Largest distance from a point to its nearest center."""
    X = _stack(points)
    _, d = assign(X, np.asarray(centers, dtype=float), rho)
    return float(d.max())


def _lerp_or_theta(p, q, s, geodesic):
    if geodesic == "theta":
        z = (1.0 - s) * np.log(p) + s * np.log(q)
        w = np.exp(z - z.max())
        return w / w.sum()
    return (1.0 - s) * p + s * q


def geodesic_cut(p, q, alpha: float, rho: Dissimilarity, tol: float = 1e-9,
                 max_iter: int = 200) -> np.ndarray:
    """Point ``v`` on the ``rho`` geodesic from ``p`` to ``q`` with
    ``rho(p, v) = alpha * rho(p, q)``.

    Closed forms are used on straight Hilbert segments and FHR great circles;
    other curves are bisected on their parameter.
    """
    if not 0.0 <= alpha <= 1.0:
        raise GeometryError("alpha must lie in [0, 1]")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if alpha == 0.0:
        return p.copy()
    if alpha == 1.0:
        return q.copy()
    if rho.geodesic == "hilbert":
        return kernels.cut(p, q, alpha, kernels.HILBERT)
    if rho.geodesic == "sphere":
        return kernels.cut(p, q, alpha, kernels.FHR)
    if rho.name in ("l1", "euc", "tv") and rho.geodesic == "segment":
        return (1.0 - alpha) * p + alpha * q
    full = float(rho(p, q))
    if full == 0.0:
        return p.copy()
    target = alpha * full
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        s = 0.5 * (lo + hi)
        v = _lerp_or_theta(p, q, s, rho.geodesic)
        f = float(rho(p, v))
        if abs(f - target) <= tol * full:
            return v
        if f < target:
            lo = s
        else:
            hi = s
    raise ToleranceNotReached(f"bisection did not reach tol={tol} in {max_iter} steps")


def minimax_center(points, rho: Dissimilarity, T: int = 100, rng=None, start: int | None = None,
                   cut: Callable | None = None, tol: float = 1e-9, max_iter: int = 200) -> np.ndarray:
    """Approximate 1-center by the geodesic walk.

    Starting from a random data point, ``T`` times move from the current
    center toward the farthest point by the fraction ``1 / (t + 1)`` of the
    geodesic.  Simplex metrics with a compiled kernel run entirely in it.
    """
    X = _stack(points)
    if start is None:
        start = int(_rng(rng).integers(len(X)))
    if cut is None and rho.kernel is not None and rho.geodesic is not None:
        return kernels.walk_center(X, rho.kernel, T, start, tol, max_iter)
    cut = cut or (lambda c, p, a: geodesic_cut(c, p, a, rho, tol, max_iter))
    c = X[start].copy()
    for t in range(1, T + 1):
        d = rho.to_point(X, c)
        far = int(np.argmax(d))
        if d[far] <= 0.0:
            break
        c = cut(c, X[far], 1.0 / (t + 1))
    return c


def kcenter_cluster(points, k: int, rho: Dissimilarity, rng=None, T: int = 10,
                    center_iters: int = 100, seed: int | None = None, tol: float = 1e-9,
                    max_iter: int = 200) -> ClusteringResult:
    """Lloyd-style k-center: k-means++ seeds, then ``T`` rounds of
    nearest-center labeling and per-cluster minimax-center updates.

    The k-center cost is tracked in ``trace`` after every round; a final
    assignment makes labels consistent with the returned centers.
    """
    if rng is None:
        rng = seed
    rng = _rng(rng)
    X = _stack(points)
    idx = kmeanspp_seed(X, k, rho, rng)
    centers = X[idx].copy()
    labels, d = assign(X, centers, rho)
    trace = [float(d.max())]
    for _ in range(T):
        for j in range(k):
            members = np.flatnonzero(labels == j)
            if members.size == 0:
                continue
            start = int(rng.integers(members.size))
            centers[j] = minimax_center(X[members], rho, center_iters, start=start,
                                        tol=tol, max_iter=max_iter)
        labels, d = assign(X, centers, rho)
        trace.append(float(d.max()))
    return ClusteringResult(labels + 1, centers, trace[-1], T, seed, list(map(int, idx)), trace)


@dataclass(frozen=True)
class KappaStats:
    kappa1_max: float
    kappa1_mean: float
    kappa1_std: float
    kappa1_min: float
    kappa2_max: float
    kappa2_mean: float
    kappa2_std: float
    kappa2_min: float
    n_samples: int
    dim: int


def uniform_simplex(rng, n: int, d: int) -> np.ndarray:
    """``n`` uniform draws on the open simplex with ``d + 1`` coordinates."""
    return rng.dirichlet(np.ones(d + 1), size=n)


def estimate_kappa(D: Dissimilarity, d: int, n_samples: int, rng=None, chunk: int = 100_000) -> KappaStats:
    """Empirical quasi-triangle ratio ``D(x:z) / (D(x:y) + D(y:z))`` and
    asymmetry ratio ``D(x:y) / D(y:x)`` over uniform random tuples."""
    if n_samples < 1:
        raise GeometryError("n_samples must be >= 1")
    rng = _rng(rng)
    k1_parts, k2_parts = [], []
    left = n_samples
    while left > 0:
        m = min(chunk, left)
        x, y, z = (uniform_simplex(rng, m, d) for _ in range(3))
        dxy = np.asarray(D(x, y), dtype=float)
        k1_parts.append(np.asarray(D(x, z)) / (dxy + np.asarray(D(y, z))))
        k2_parts.append(np.ones(m) if D.symmetric else dxy / np.asarray(D(y, x)))
        left -= m
    k1 = np.concatenate(k1_parts)
    k2 = np.concatenate(k2_parts)
    return KappaStats(float(k1.max()), float(k1.mean()), float(k1.std()), float(k1.min()),
                      float(k2.max()), float(k2.mean()), float(k2.std()), float(k2.min()),
                      n_samples, d)
