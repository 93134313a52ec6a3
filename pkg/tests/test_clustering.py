import itertools

import numpy as np
import pytest

from hilbert_simplex import clustering as cl
from hilbert_simplex import distances as dist
from hilbert_simplex import errors
from hilbert_simplex.evaluation import hilbert_minimax_lp, nmi

H = cl.get_dissimilarity("hilbert")
FHR = cl.get_dissimilarity("fhr")
KL = cl.get_dissimilarity("kl")


def toy_clusters(rng, n_per=20, spread=0.05):
    """Three tight clusters near the corners of the 2-simplex."""
    centers = np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    pts, labels = [], []
    for j, c in enumerate(centers):
        z = np.log(c) + spread * rng.standard_normal((n_per, 3))
        w = np.exp(z)
        pts.append(w / w.sum(axis=1, keepdims=True))
        labels += [j + 1] * n_per
    return np.vstack(pts), np.array(labels)


def test_registry_lookup():
    assert cl.get_dissimilarity("HILBERT").name == "hilbert"
    with pytest.raises(errors.UnknownMetric, match="valid names"):
        cl.get_dissimilarity("nope")
    assert cl.get_dissimilarity("birkhoff", "cone").kernel is not None
    assert cl.get_dissimilarity("thompson", "matrix").symmetric


def test_squared_dissimilarity():
    p, q = np.array([0.2, 0.8]), np.array([0.5, 0.5])
    assert H.squared()(p, q) == pytest.approx(dist.rho_hilbert(p, q) ** 2)
    assert H.seeding(np.atleast_2d(p), q)[0] == pytest.approx(dist.rho_hilbert(p, q) ** 2)
    assert KL.seeding(np.atleast_2d(p), q)[0] == pytest.approx(dist.rho_kl(p, q))


# --- k-means++ -------------------------------------------------------------

def test_seed_k_equals_n(rng):
    X = rng.dirichlet(np.ones(3), 6)
    assert sorted(cl.kmeanspp_seed(X, 6, H, rng)) == list(range(6))


def test_seed_separated_clusters():
    rng = np.random.default_rng(7)
    X, labels = toy_clusters(rng)
    X, labels = X[labels <= 2], labels[labels <= 2]
    hits = 0
    for s in range(1000):
        idx = cl.kmeanspp_seed(X, 2, H, np.random.default_rng(s))
        hits += labels[idx[0]] != labels[idx[1]]
    assert hits > 950


def test_seed_degenerate():
    X = np.tile([0.2, 0.3, 0.5], (5, 1))
    with pytest.raises(errors.NotEnoughDistinctPoints):
        cl.kmeanspp_seed(X, 2, H, 0)


def test_kmeanspp_k1(rng):
    X = rng.dirichlet(np.ones(4), 15)
    res = cl.kmeanspp_cluster(X, 1, H, seed=3)
    assert np.all(res.labels == 1)
    c = X[res.center_indices[0]]
    assert res.objective == pytest.approx(np.mean(dist.rho_hilbert(X, c) ** 2))


def test_kmeanspp_toy_nmi():
    scores = []
    for s in range(100):
        X, labels = toy_clusters(np.random.default_rng(s))
        scores.append(nmi(labels, cl.kmeanspp_cluster(X, 3, H, seed=s).labels))
    assert np.median(scores) >= 0.9


def test_kmeanspp_refine_monotone(rng):
    for s in range(10):
        X = np.random.default_rng(s).dirichlet(np.ones(5), 40)
        for D in (H, KL):
            tr = cl.kmeanspp_cluster(X, 4, D, seed=s, refine_rounds=8).trace
            assert all(b <= a + 1e-12 for a, b in zip(tr, tr[1:]))


def test_kmeanspp_deterministic(rng):
    X = rng.dirichlet(np.ones(5), 30)
    a = cl.kmeanspp_cluster(X, 3, FHR, seed=11).to_dict()
    b = cl.kmeanspp_cluster(X, 3, FHR, seed=11).to_dict()
    assert a == b


def test_kmeanspp_frozen_seeds():
    # regression value for the fixed PCG64 stream
    X = np.random.default_rng(0).dirichlet(np.ones(3), 12)
    assert cl.kmeanspp_seed(X, 3, H, np.random.default_rng(0)) == FROZEN_SEEDS


FROZEN_SEEDS = [10, 2, 0]


# --- farthest-first and k-center --------------------------------------------

def test_farthest_first_collinear():
    a = np.array([0.6, 0.2, 0.2])
    c = np.array([0.2, 0.2, 0.6])
    b = 0.5 * (a + c)
    X = np.stack([a, b, c])
    assert cl.farthest_first_seed(X, 2, H, first=0) == [0, 2]
    assert sorted(cl.farthest_first_seed(X, 3, H, first=0)) == [0, 1, 2]


def _brute_force_discrete(X, k, rho):
    D = np.stack([rho.to_point(X, x) for x in X], axis=1)
    best = np.inf
    for S in itertools.combinations(range(len(X)), k):
        best = min(best, D[:, list(S)].min(axis=1).max())
    return best


def _brute_force_hilbert(X, k):
    # continuous optimum: best partition, exact minimax radius per part
    n = len(X)
    radius = {}
    for mask in range(1, 2 ** n):
        members = [i for i in range(n) if mask >> i & 1]
        radius[mask] = 0.0 if len(members) == 1 else hilbert_minimax_lp(X[members])[1]
    best = np.inf
    for assign in itertools.product(range(k), repeat=n):
        masks = [0] * k
        for i, a in enumerate(assign):
            masks[a] |= 1 << i
        if all(masks):
            best = min(best, max(radius[m] for m in masks))
    return best


def test_farthest_first_two_approx():
    rng = np.random.default_rng(2)
    for _ in range(25):
        n, k = int(rng.integers(3, 8)), int(rng.integers(1, 4))
        X = rng.dirichlet(np.ones(3), n)
        for rho in (H, FHR, cl.get_dissimilarity("l1")):
            cost = cl.kcenter_cost(X, X[cl.farthest_first_seed(X, k, rho, rng)], rho)
            assert cost <= 2 * _brute_force_discrete(X, k, rho) + 1e-12
        cost = cl.kcenter_cost(X, X[cl.farthest_first_seed(X, k, H, rng)], H)
        assert cost <= 2 * _brute_force_hilbert(X, k) + 1e-9


def test_kcenter_k1_is_minimax(rng):
    X = rng.dirichlet(np.ones(3), 25)
    res = cl.kcenter_cluster(X, 1, H, seed=0, T=3, center_iters=500)
    _, r = hilbert_minimax_lp(X)
    assert np.all(res.labels == 1)
    assert res.objective <= r * 1.05


def test_kcenter_toy_nmi():
    scores = []
    for s in range(100):
        X, labels = toy_clusters(np.random.default_rng(100 + s))
        scores.append(nmi(labels, cl.kcenter_cluster(X, 3, H, seed=s, T=3, center_iters=30).labels))
    assert np.median(scores) >= 0.9


def test_kcenter_more_rounds_help():
    finals = {1: [], 10: []}
    for s in range(20):
        X = np.random.default_rng(s).dirichlet(np.ones(5), 40)
        for T in finals:
            res = cl.kcenter_cluster(X, 3, H, seed=s, T=T)
            assert len(res.trace) == T + 1
            finals[T].append(res.objective)
    assert np.mean(finals[10]) <= np.mean(finals[1])


def test_kcenter_labels_match_centers(rng):
    X = rng.dirichlet(np.ones(4), 30)
    res = cl.kcenter_cluster(X, 3, FHR, seed=1, T=4)
    labels, d = cl.assign(X, res.centers, FHR)
    np.testing.assert_array_equal(labels + 1, res.labels)
    assert res.objective == pytest.approx(d.max())


# --- minimax walk -----------------------------------------------------------

def test_minimax_single_point():
    X = np.array([[0.2, 0.3, 0.5]])
    np.testing.assert_allclose(cl.minimax_center(X, H, T=20), X[0])


def test_minimax_two_points_midpoint():
    X = np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]])
    mid = cl.geodesic_cut(X[0], X[1], 0.5, H)
    errs = [dist.rho_hilbert(cl.minimax_center(X, H, T=T, start=0), mid) for T in (10, 100, 1000)]
    assert errs[-1] < errs[0]
    assert errs[-1] < 1e-2


def test_minimax_stays_interior(rng):
    X = rng.dirichlet(0.3 * np.ones(6), 50)
    for rho in (H, FHR, KL, cl.get_dissimilarity("rkl")):
        c = cl.minimax_center(X, rho, T=50, start=0)
        assert np.all(c > 0)
        assert c.sum() == pytest.approx(1.0)


def test_minimax_kernel_and_python_paths_agree(rng):
    X = rng.dirichlet(np.ones(5), 30)
    for rho in (H, FHR, KL):
        fast = cl.minimax_center(X, rho, T=100, start=2)
        slow = cl.minimax_center(X, rho, T=100, start=2, cut=lambda c, p, a: cl.geodesic_cut(c, p, a, rho))
        np.testing.assert_allclose(fast, slow, rtol=1e-7, atol=1e-10)


def test_minimax_empty():
    with pytest.raises(errors.EmptyInput):
        cl.minimax_center(np.empty((0, 3)), H)


# --- geodesic cut -----------------------------------------------------------

@pytest.mark.parametrize("name", ["hilbert", "fhr", "kl", "rkl", "skl", "l1", "euc", "cs"])
def test_cut_endpoints_and_fraction(name, rng):
    rho = cl.get_dissimilarity(name)
    p, q = rng.dirichlet(np.ones(4), 2)
    np.testing.assert_allclose(cl.geodesic_cut(p, q, 0.0, rho), p)
    np.testing.assert_allclose(cl.geodesic_cut(p, q, 1.0, rho), q)
    for a in (0.25, 0.5, 0.8):
        v = cl.geodesic_cut(p, q, a, rho)
        # bisection stops within tol of the full distance
        assert abs(rho(p, v) - a * rho(p, q)) <= 1e-9 * rho(p, q) + 1e-12


def test_cut_bernoulli_midpoint():
    p, q = np.array([0.1, 0.9]), np.array([0.7, 0.3])
    v = cl.geodesic_cut(p, q, 0.5, H)
    assert dist.rho_hilbert(p, v) == pytest.approx(dist.rho_hilbert(v, q), abs=1e-9)
    # logit midpoint in one dimension
    logit = 0.5 * (np.log(0.1 / 0.9) + np.log(0.7 / 0.3))
    assert v[0] == pytest.approx(1 / (1 + np.exp(-logit)), abs=1e-12)


def test_cut_curves(rng):
    p, q = rng.dirichlet(np.ones(5), 2)
    v = cl.geodesic_cut(p, q, 0.3, FHR)
    # on the great circle: sqrt(v) is in the span of sqrt(p), sqrt(q)
    B = np.stack([np.sqrt(p), np.sqrt(q)], axis=1)
    coef, *_ = np.linalg.lstsq(B, np.sqrt(v), rcond=None)
    np.testing.assert_allclose(B @ coef, np.sqrt(v), atol=1e-12)
    v = cl.geodesic_cut(p, q, 0.3, KL)
    s = (v - p)[0] / (q - p)[0]
    np.testing.assert_allclose(v, (1 - s) * p + s * q, atol=1e-12)
    v = cl.geodesic_cut(p, q, 0.3, KL.with_geodesic("theta"))
    z = np.log(v) - np.log(v[0])
    lp, lq = np.log(p) - np.log(p[0]), np.log(q) - np.log(q[0])
    t = (z - lp)[1] / (lq - lp)[1]
    np.testing.assert_allclose(z, (1 - t) * lp + t * lq, atol=1e-10)


def test_distance_monotone_along_segment(rng):
    t = np.linspace(0, 1, 101)
    for _ in range(20):
        p, q = rng.dirichlet(np.ones(4), 2)
        path = (1 - t)[:, None] * p + t[:, None] * q
        for f in (dist.rho_hilbert, dist.rho_kl):
            d = f(np.broadcast_to(p, path.shape), path)
            assert np.all(np.diff(d) >= -1e-12)


def test_cut_tolerance_not_reached(rng):
    p, q = rng.dirichlet(np.ones(4), 2)
    with pytest.raises(errors.ToleranceNotReached):
        cl.geodesic_cut(p, q, 0.37, cl.get_dissimilarity("rkl"), tol=1e-12, max_iter=2)
    with pytest.raises(errors.GeometryError):
        cl.geodesic_cut(p, q, 1.5, H)


# --- kappa -------------------------------------------------------------------

def test_kappa_symmetric_is_one(rng):
    st = cl.estimate_kappa(H, 3, 1000, rng)
    assert st.kappa2_max == st.kappa2_min == 1.0
    st = cl.estimate_kappa(KL, 3, 1000, rng)
    assert st.kappa2_max > 1.0 > st.kappa2_min


def test_kappa_metric_below_one(rng):
    st = cl.estimate_kappa(H, 4, 20_000, rng)
    assert st.kappa1_max <= 1.0 + 1e-9


def test_kappa_chunks_match(rng):
    a = cl.estimate_kappa(H.squared(), 2, 500, np.random.default_rng(1), chunk=500)
    b = cl.estimate_kappa(H.squared(), 2, 500, np.random.default_rng(1), chunk=500)
    assert a == b
    with pytest.raises(errors.GeometryError):
        cl.estimate_kappa(H, 2, 0)


def test_kappa_mean_has_nesbitt_floor(rng):
    # exchangeable triples: the three role assignments sum to >= 3/2 pointwise
    x, y, z = (cl.uniform_simplex(rng, 20_000, 3) for _ in range(3))
    D = H.squared()
    a, b, c = D(x, z), D(x, y), D(y, z)
    s = a / (b + c) + b / (a + c) + c / (a + b)
    assert s.min() >= 1.5 - 1e-12
    assert cl.estimate_kappa(D, 3, 20_000, rng).kappa1_mean > 0.5
