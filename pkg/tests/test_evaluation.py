import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import normalized_mutual_info_score

from hilbert_simplex import errors
from hilbert_simplex import evaluation as ev

labelings = st.lists(st.integers(1, 4), min_size=2, max_size=40)


def test_nmi_matches_sklearn(rng):
    for _ in range(200):
        n = int(rng.integers(2, 60))
        a, b = rng.integers(1, 5, n), rng.integers(1, 4, n)
        for avg in ("arithmetic", "geometric"):
            assert ev.nmi(a, b, avg) == pytest.approx(
                normalized_mutual_info_score(a, b, average_method=avg), abs=1e-12)


def test_nmi_examples():
    assert ev.nmi([1, 1, 2, 2], [2, 2, 1, 1]) == pytest.approx(1.0)
    assert ev.nmi([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(0.0, abs=1e-15)
    assert ev.nmi([1, 1, 1], [1, 1, 1]) == 1.0
    assert ev.nmi([1, 1, 1], [1, 2, 3]) == 0.0
    with pytest.raises(errors.LengthMismatch):
        ev.nmi([1, 2], [1, 2, 3])
    with pytest.raises(errors.LengthMismatch):
        ev.nmi([], [])
    with pytest.raises(ValueError):
        ev.nmi([1, 2], [1, 2], "max")


@given(labelings, st.randoms(use_true_random=False))
def test_nmi_properties(a, r):
    b = [r.randint(1, 3) for _ in a]
    v = ev.nmi(a, b)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(ev.nmi(b, a), abs=1e-12)
    relabel = {x: 10 - x for x in set(a)}
    assert ev.nmi([relabel[x] for x in a], b) == pytest.approx(v, abs=1e-12)
    assert ev.nmi(a, a) == pytest.approx(1.0, abs=1e-12)


def test_nmi_independent_labels_small():
    rng = np.random.default_rng(3)
    a, b = rng.integers(1, 4, 20000), rng.integers(1, 4, 20000)
    assert ev.nmi(a, b) < 0.01


def test_row_statistics():
    r = ev.BenchmarkRow({"k": 3}, "hilbert", [0.5, 0.7, 0.9])
    assert r.runs == 3
    assert r.mean == pytest.approx(0.7)
    assert r.std == pytest.approx(np.sqrt(((0.2) ** 2 * 2) / 3))
    d = r.to_dict()
    assert d["mean"] == r.mean and d["stat"] == "nmi"


def test_report_formats():
    rows = [ev.BenchmarkRow({"k": 3, "n": 50}, m, [0.25, 0.75]) for m in ("hilbert", "l1")]
    rep = ev.BenchmarkReport("toy", 0, rows, {"runs": 2})
    assert rep.row("l1", k=3) is rows[1]
    with pytest.raises(KeyError):
        rep.row("kl")
    text = rep.to_text()
    assert "0.50±0.25" in text and "hilbert" in text
    csv_lines = rep.to_csv().splitlines()
    assert csv_lines[0] == "k,n,metric,stat,run,score"
    assert len(csv_lines) == 5
    assert json.loads(rep.to_json())["rows"][0]["scores"] == [0.25, 0.75]


def test_suite_registry():
    assert set(ev.ALL_SUITES) == {"table2", "table3", "table4", "table5", "table6",
                                  "kappa_fig", "convergence_fig"}
    assert len(ev.SUITES["table2"]["configs"]) == 32
    assert ev.SUITES["table3"]["algo"] == "kcenter"
    with pytest.raises(errors.UnknownSuite):
        ev.run_benchmark("table9")
    with pytest.raises(ValueError):
        ev.run_benchmark("table2", runs=0)


SMALL = [{"noise": "gaussian", "k": 3, "n": 50, "d": 9, "sigma": 0.5}]


def test_benchmark_deterministic():
    a = ev.run_benchmark("table2", runs=3, seed=5, configs=SMALL)
    b = ev.run_benchmark("table2", runs=3, seed=5, configs=SMALL)
    assert a.to_json() == b.to_json()
    assert len(a.rows) == 5
    assert a.settings["seeding"]["hilbert"] == "squared"
    assert a.settings["seeding"]["kl"] == "raw"


def test_benchmark_workers_match_serial():
    a = ev.run_benchmark("table3", runs=4, seed=1, configs=SMALL)
    b = ev.run_benchmark("table3", runs=4, seed=1, configs=SMALL, workers=2)
    assert a.to_json() == b.to_json()


def test_run_seeds_are_independent_of_grid():
    # the same run index sees the same data regardless of other configs
    other = dict(SMALL[0], sigma=0.9)
    a = ev.run_benchmark("table2", runs=2, seed=0, configs=SMALL)
    b = ev.run_benchmark("table2", runs=2, seed=0, configs=[other, SMALL[0]])
    assert a.row("hilbert").scores == b.row("hilbert", sigma=0.5).scores


def test_matrix_suites_run():
    for suite, cfg in (("table5", {"nu1": 4, "nu2": 30, "k": 3, "n": 30, "d": 3}),
                       ("table6", {"gamma_shape": 2, "sigma": 0.1, "gamma_scale": 1,
                                   "k": 3, "n": 30, "d": 2})):
        rep = ev.run_benchmark(suite, runs=2, configs=[cfg])
        assert all(0 <= r.mean <= 1 for r in rep.rows)


def test_kappa_suite_shape():
    rep = ev.run_benchmark("kappa_fig", runs=200, configs=[{"d": 2}])
    assert [r.metric for r in rep.rows] == ["fhr^2", "hilbert^2", "l1^2"]
    assert all(r.stat == "kappa1" for r in rep.rows)


def test_minimax_lp_oracle(rng):
    # LP radius equals half the diameter for two points, and bounds every point
    X = rng.dirichlet(np.ones(4), 2)
    from hilbert_simplex.distances import rho_hilbert
    c, r = ev.hilbert_minimax_lp(X)
    assert r == pytest.approx(0.5 * rho_hilbert(X[0], X[1]), rel=1e-8)
    X = rng.dirichlet(np.ones(4), 30)
    c, r = ev.hilbert_minimax_lp(X)
    assert rho_hilbert(X, c).max() == pytest.approx(r, rel=1e-7)
    assert ev.distance_to_minimax_set(X, c, r) == pytest.approx(0.0, abs=1e-7)


def test_convergence_suite_small():
    rep = ev.run_benchmark("convergence_fig", runs=3, configs=[{"n": 20, "d": 3}])
    med = [r.extra["median"] for r in rep.rows]
    assert [r.config["T"] for r in rep.rows] == list(ev.CONVERGENCE_T)
    assert med[-1] < med[0]
