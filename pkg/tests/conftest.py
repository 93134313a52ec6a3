import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays


def simplex_points(min_dim=2, max_dim=12):
    """Hypothesis strategy: interior simplex points with moderate log-ratios."""
    return st.integers(min_dim, max_dim).flatmap(
        lambda D: arrays(np.float64, D, elements=st.floats(-6.0, 6.0)).map(_softmax))


def simplex_pairs(min_dim=2, max_dim=12, count=2):
    return st.integers(min_dim, max_dim).flatmap(
        lambda D: st.tuples(*[arrays(np.float64, D, elements=st.floats(-6.0, 6.0)).map(_softmax)
                              for _ in range(count)]))


def _softmax(z):
    w = np.exp(z - z.max())
    return w / w.sum()


def random_spd(rng, d, cond=None):
    A = rng.standard_normal((d, d))
    Q, _ = np.linalg.qr(A)
    if cond is None:
        lam = rng.uniform(0.2, 5.0, d)
    else:
        lam = np.exp(rng.uniform(0, np.log(cond), d))
    return (Q * lam) @ Q.T


def random_correlation(rng, d):
    S = random_spd(rng, d)
    s = 1.0 / np.sqrt(np.diag(S))
    C = S * s[:, None] * s[None, :]
    np.fill_diagonal(C, 1.0)
    return 0.5 * (C + C.T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record their outcome here; printed at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}: {title} | {detail}")
