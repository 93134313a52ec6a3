import os
import subprocess
import sys

import numpy as np
import pytest

from hilbert_simplex import _pykernels, kernels
from hilbert_simplex import distances as dist

try:
    from hilbert_simplex import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
BACKENDS.append(pytest.param(_ckernels, id="cython", marks=pytest.mark.skipif(
    _ckernels is None, reason="extension not built")))

REFERENCE = {
    kernels.HILBERT: dist.rho_hilbert,
    kernels.FHR: dist.rho_fhr,
    kernels.L1: dist.rho_l1,
    kernels.EUC: dist.rho_euclidean,
    kernels.KL_ETA: dist.rho_kl,
    kernels.KL_THETA: dist.rho_kl,
}


@pytest.fixture
def data(rng):
    return rng.dirichlet(np.ones(8), 40)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("code", sorted(REFERENCE))
def test_one_to_many_matches_numpy(impl, code, data):
    y = data[5]
    got = impl.one_to_many(np.ascontiguousarray(data), np.ascontiguousarray(y), code)
    np.testing.assert_allclose(got, REFERENCE[code](data, y), rtol=1e-10, atol=1e-7)


@pytest.mark.parametrize("impl", BACKENDS)
def test_pairwise(impl, data):
    X = np.ascontiguousarray(data[:6])
    Y = np.ascontiguousarray(data[6:10])
    got = impl.pairwise(X, Y, kernels.HILBERT)
    ref = np.stack([dist.rho_hilbert(X, y) for y in Y], axis=1)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("code", [kernels.HILBERT, kernels.FHR, kernels.KL_ETA, kernels.KL_THETA])
def test_cut_hits_fraction(impl, code, data):
    c, p = data[0].copy(), data[1].copy()
    rho = REFERENCE[code]
    for alpha in (0.1, 0.5, 0.9):
        v = impl.cut(c, p, alpha, code, 1e-11, 200)
        assert rho(c, v) == pytest.approx(alpha * rho(c, p), rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_hilbert_cut_on_segment(impl, data):
    c, p = data[2].copy(), data[3].copy()
    v = impl.cut(c, p, 0.3, kernels.HILBERT, 1e-9, 200)
    # v - c must be parallel to p - c with a coefficient in [0, 1]
    s = np.dot(v - c, p - c) / np.dot(p - c, p - c)
    assert 0 <= s <= 1
    np.testing.assert_allclose(v, (1 - s) * c + s * p, atol=1e-14)


def test_backends_agree_on_walk(data):
    if _ckernels is None:
        pytest.skip("extension not built")
    X = np.ascontiguousarray(data)
    for code in REFERENCE:
        a = _ckernels.walk_center(X, code, 200, 0, 1e-9, 200)
        b = _pykernels.walk_center(X, code, 200, 0, 1e-9, 200)
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_wrappers_accept_views(data):
    X = data[:, ::-1][::2]  # non-contiguous
    got = kernels.one_to_many(X, X[0], kernels.HILBERT)
    np.testing.assert_allclose(got, dist.rho_hilbert(X, X[0]), atol=1e-14)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None and os.environ.get("HILBERT_SIMPLEX_PURE", "") in ("", "0"):
        assert kernels.BACKEND == "cython"


def test_env_var_forces_fallback():
    env = dict(os.environ, HILBERT_SIMPLEX_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from hilbert_simplex import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
