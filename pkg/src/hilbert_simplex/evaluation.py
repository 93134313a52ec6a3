"""Clustering scores and the multi-run benchmark suites.

A suite is a list of configurations times a list of metrics.  Each run
draws a fresh dataset with seed ``base_seed + run_index`` and clusters it
with every metric (the clustering RNG is seeded from the same index, offset
so it never coincides with the data stream).  Rows report mean and
population standard deviation of the per-run scores.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import clustering as cl
from . import datagen as dg
from .errors import LengthMismatch, UnknownSuite
from .simplex_core import format_number

CLUSTER_SEED_OFFSET = 1_000_003


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(labels_a, labels_b, average: str = "arithmetic") -> float:
    """Normalized mutual information between two labelings.

    The mutual information is divided by the arithmetic (default) or
    geometric mean of the two entropies.  If either labeling is a single
    cluster the score is 1 for identical partitions and 0 otherwise.
    """
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"label vectors have lengths {a.size} and {b.size}")
    if a.size == 0:
        raise LengthMismatch("label vectors are empty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(table, (ia, ib), 1.0)
    ha, hb = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if ha == 0.0 or hb == 0.0:
        same = table.shape[0] == table.shape[1] and np.count_nonzero(table) == table.shape[0]
        return 1.0 if same else 0.0
    pij = table / a.size
    outer = np.outer(pij.sum(axis=1), pij.sum(axis=0))
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    if average == "arithmetic":
        norm = 0.5 * (ha + hb)
    elif average == "geometric":
        norm = np.sqrt(ha * hb)
    else:
        raise ValueError(f"average must be 'arithmetic' or 'geometric', not {average!r}")
    return float(min(max(mi / norm, 0.0), 1.0))


@dataclass
class BenchmarkRow:
    config: dict
    metric: str
    scores: list
    stat: str = "nmi"
    extra: dict = field(default_factory=dict)

    @property
    def runs(self) -> int:
        return len(self.scores)

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def std(self) -> float:
        return float(np.std(self.scores))

    def to_dict(self) -> dict:
        out = {"config": self.config, "metric": self.metric, "stat": self.stat,
               "runs": self.runs, "mean": self.mean, "std": self.std,
               "scores": [float(s) for s in self.scores]}
        if self.extra:
            out["extra"] = self.extra
        return out


@dataclass
class BenchmarkReport:
    suite: str
    seed: int
    rows: list
    settings: dict = field(default_factory=dict)

    def row(self, metric: str, **config) -> BenchmarkRow:
        for r in self.rows:
            if r.metric == metric and all(r.config.get(k) == v for k, v in config.items()):
                return r
        raise KeyError(f"no row for {metric} with {config}")

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "settings": self.settings,
                "rows": [r.to_dict() for r in self.rows]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        """One line per (configuration, metric, run)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = sorted({k for r in self.rows for k in r.config})
        w.writerow([*keys, "metric", "stat", "run", "score"])
        for r in self.rows:
            for i, s in enumerate(r.scores):
                w.writerow([r.config.get(k, "") for k in keys] + [r.metric, r.stat, i, format_number(s)])
        return buf.getvalue()

    def to_text(self) -> str:
        """Aligned table: configuration columns, then ``mean±std`` per metric."""
        metrics = list(dict.fromkeys(r.metric for r in self.rows))
        keys = list(dict.fromkeys(k for r in self.rows for k in r.config))
        configs = []
        for r in self.rows:
            if r.config not in configs:
                configs.append(r.config)
        table = [keys + metrics]
        for cfg in configs:
            line = [str(cfg.get(k, "")) for k in keys]
            for m in metrics:
                try:
                    r = next(x for x in self.rows if x.metric == m and x.config == cfg)
                    line.append(f"{r.mean:.2f}±{r.std:.2f}")
                except StopIteration:
                    line.append("-")
            table.append(line)
        widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in table]
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join([f"# {self.suite} (seed {self.seed})", *lines]) + "\n"


# ---------------------------------------------------------------------------
# suite definitions

def _grid(**axes):
    out = [{}]
    for key, values in axes.items():
        out = [dict(c, **{key: v}) for c in out for v in values]
    return out


SIMPLEX_COLUMNS = ["fhr", "kl", "hilbert", "euc", "l1"]

SUITES = {
    "table2": {"domain": "simplex", "algo": "kmeanspp", "metrics": SIMPLEX_COLUMNS,
               "configs": _grid(noise=["gaussian", "student5"], k=[3, 5], n=[50, 100],
                                d=[9, 255], sigma=[0.5, 0.9])},
    "table3": {"domain": "simplex", "algo": "kcenter", "metrics": SIMPLEX_COLUMNS,
               "configs": _grid(noise=["gaussian", "student5"], k=[3, 5], n=[50, 100],
                                d=[9, 255], sigma=[0.5, 0.9])},
    "table4": {"domain": "cone", "algo": "kmeanspp", "metrics": ["ekl", "rekl", "sekl", "birkhoff"],
               "configs": _grid(k=[3, 5], sigma=[0.5, 0.9], n=[50], d=[10])},
    "table5": {"domain": "matrix", "algo": "kmeanspp",
               "metrics": ["hilbert", "euc", "l1", "sqrt_logdet"],
               "configs": _grid(nu1=[4, 5], nu2=[10, 30, 50], k=[3], n=[100], d=[3])},
    "table6": {"domain": "matrix", "algo": "kmeanspp", "metrics": ["kl", "rkl", "skl", "thompson"],
               "configs": _grid(gamma_shape=[2.0, 5.0], sigma=[0.1, 0.3], gamma_scale=[1.0],
                                k=[5], n=[250], d=[2])},
}
ALL_SUITES = (*SUITES, "kappa_fig", "convergence_fig")


def make_dataset(domain: str, config: dict, seed: int) -> dg.LabeledDataset:
    if domain in ("simplex", "cone"):
        spec = dg.SimplexClusterSpec(k=config["k"], n=config["n"], d=config["d"],
                                     sigma=config["sigma"], noise=config.get("noise", "gaussian"),
                                     seed=seed)
        return dg.gen_simplex_clusters(spec) if domain == "simplex" else dg.gen_positive_measures(spec)
    if "nu1" in config:
        return dg.gen_elliptope_clusters(config["k"], config["n"], config["d"], config["nu1"],
                                         config["nu2"], seed)
    return dg.gen_psd_clusters(config["k"], config["n"], config["d"], config["gamma_shape"],
                               config["gamma_scale"], config["sigma"], seed,
                               config.get("eigen", "cluster"))


def _one_run(args):
    suite, config, run_seed, refine_rounds, T = args
    info = SUITES[suite]
    ds = make_dataset(info["domain"], config, run_seed)
    out = []
    for m in info["metrics"]:
        D = cl.get_dissimilarity(m, info["domain"])
        cseed = run_seed + CLUSTER_SEED_OFFSET
        if info["algo"] == "kcenter":
            res = cl.kcenter_cluster(ds.points, config["k"], D, T=T, seed=cseed)
        else:
            res = cl.kmeanspp_cluster(ds.points, config["k"], D, refine_rounds=refine_rounds, seed=cseed)
        out.append(nmi(ds.labels, res.labels))
    return out


def _clustering_suite(suite, runs, seed, configs, refine_rounds, T, workers):
    info = SUITES[suite]
    configs = info["configs"] if configs is None else configs
    jobs = [(suite, cfg, seed + r, refine_rounds, T) for cfg in configs for r in range(runs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_one_run, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_one_run(j) for j in jobs]
    rows = []
    for ci, cfg in enumerate(configs):
        block = np.array(results[ci * runs:(ci + 1) * runs])
        for mi, m in enumerate(info["metrics"]):
            rows.append(BenchmarkRow(dict(cfg), m, block[:, mi].tolist()))
    settings = {"algo": info["algo"], "domain": info["domain"], "runs": runs,
                "refine_rounds": refine_rounds, "rng": "numpy PCG64",
                "seeding": {m: ("squared" if cl.get_dissimilarity(m, info["domain"]).squared_for_kmeans
                                else "raw") for m in info["metrics"]}}
    if info["algo"] == "kcenter":
        settings["T"] = T
    return BenchmarkReport(suite, seed, rows, settings)


KAPPA_METRICS = ("fhr", "hilbert", "l1")


def _kappa_suite(runs, seed, configs):
    dims = [c["d"] for c in configs] if configs else list(range(1, 11))
    rows = []
    for m in KAPPA_METRICS:
        D = cl.get_dissimilarity(m).squared()
        for d in dims:
            st = cl.estimate_kappa(D, d, runs, rng=np.random.default_rng([seed, d]))
            rows.append(BenchmarkRow({"d": d}, f"{m}^2", [st.kappa1_mean], "kappa1",
                                     {"kappa1_max": st.kappa1_max, "kappa1_std": st.kappa1_std,
                                      "kappa2_max": st.kappa2_max, "n_samples": st.n_samples}))
    return BenchmarkReport("kappa_fig", seed, rows, {"n_samples": runs})


def hilbert_minimax_lp(X) -> tuple[np.ndarray, float]:
    """Exact Hilbert minimax center and radius of a point set in the simplex.

    In log coordinates ``rho(x, c) <= r`` is the set of linear constraints
    ``(l_a - u_a) - (l_b - u_b) <= r`` over ordered coordinate pairs.
    """
    L = np.log(np.asarray(X, dtype=float))
    A, b = _pair_constraints(L, with_radius=True)
    D = L.shape[1]
    c = np.zeros(D + 1)
    c[D] = 1.0
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * D + [(0, None)], method="highs")
    u = res.x[:D]
    p = np.exp(u - u.max())
    return p / p.sum(), float(res.x[D])


def _pair_constraints(L, with_radius: bool):
    n, D = L.shape
    rows, rhs = [], []
    for a in range(D):
        for b in range(D):
            if a != b:
                A = np.zeros((n, D + 1))
                A[:, a], A[:, b] = -1.0, 1.0
                if with_radius:
                    A[:, D] = -1.0
                rows.append(A)
                rhs.append(-(L[:, a] - L[:, b]))
    return np.vstack(rows), np.concatenate(rhs)


def distance_to_minimax_set(X, c, radius: float, slack: float = 1e-9) -> float:
    """Hilbert distance from ``c`` to the nearest center of radius ``radius``.

    Minimax centers of the Hilbert simplex metric are generally not unique,
    so the error of an approximate center is measured against the whole
    optimal set rather than one arbitrary optimizer.
    """
    L = np.log(np.asarray(X, dtype=float))
    w = np.log(np.asarray(c, dtype=float))
    A, b = _pair_constraints(L, with_radius=False)
    b = b + radius * (1.0 + slack)
    D = L.shape[1]
    extra, rhs = [], []
    for i in range(D):
        for j in range(D):
            if i != j:
                row = np.zeros(D + 1)
                row[i], row[j], row[D] = 1.0, -1.0, -1.0
                extra.append(row)
                rhs.append(w[i] - w[j])
    obj = np.zeros(D + 1)
    obj[D] = 1.0
    res = linprog(obj, A_ub=np.vstack([A, extra]), b_ub=np.concatenate([b, rhs]),
                  bounds=[(None, None)] * D + [(0, None)], method="highs")
    return float(res.x[D])


CONVERGENCE_T = (1, 10, 100, 1000)


def _convergence_suite(runs, seed, configs):
    cfg = configs[0] if configs else {"n": 100, "d": 9}
    H = cl.get_dissimilarity("hilbert")
    errs = {T: [] for T in CONVERGENCE_T}
    for r in range(runs):
        X = np.random.default_rng(seed + r).dirichlet(np.ones(cfg["d"] + 1), cfg["n"])
        _, radius = hilbert_minimax_lp(X)
        for T in CONVERGENCE_T:
            c = cl.minimax_center(X, H, T=T, start=0)
            errs[T].append(distance_to_minimax_set(X, c, radius) / radius)
    rows = [BenchmarkRow(dict(cfg, T=T), "hilbert", errs[T], "relative_error",
                         {"median": float(np.median(errs[T]))}) for T in CONVERGENCE_T]
    return BenchmarkReport("convergence_fig", seed, rows, {"datasets": runs, "start": 0})


def run_benchmark(suite: str, runs: int = 300, seed: int = 0, configs=None,
                  refine_rounds: int = 0, T: int = 10, workers: int | None = None) -> BenchmarkReport:
    """Run a named suite.

    ``configs`` restricts the configuration grid (list of dicts with the
    suite's keys).  For ``kappa_fig`` ``runs`` is the number of sampled
    triples per dimension; for ``convergence_fig`` it is the number of
    random datasets.
    """
    if suite not in ALL_SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(ALL_SUITES)}")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if suite == "kappa_fig":
        return _kappa_suite(runs, seed, configs)
    if suite == "convergence_fig":
        return _convergence_suite(runs, seed, configs)
    return _clustering_suite(suite, runs, seed, configs, refine_rounds, T, workers)
