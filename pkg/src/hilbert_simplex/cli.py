"""Command-line interface: ``hilbert-simplex {dist,cluster,gen,bench,figure}``.

Exit codes: 0 success, 2 invalid input, 3 infeasible request (more clusters
than distinct points).  Numbers are printed with 9 significant digits.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import clustering as cl
from . import datagen as dg
from . import evaluation as ev
from . import figures as fig
from . import matrix_geometry as mg
from .errors import GeometryError, NotEnoughDistinctPoints
from .simplex_core import ConeVector, SimplexPoint, format_number, read_points_csv, read_points_json

log = logging.getLogger("hilbert_simplex")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 2, 3


class InputError(Exception):
    """Raised for command-line input problems; mapped to exit code 2."""


def _write(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _detect_domain(path: Path, domain: str) -> str:
    if domain != "auto":
        return domain
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        if isinstance(data, dict) and "matrices" in data:
            return "matrix"
        rows = data.get("points", data) if isinstance(data, dict) else data
        if rows and isinstance(rows[0][0], list):
            return "matrix"
    return "simplex"


def load_points(path, domain: str = "auto"):
    """Read a dataset; returns ``(domain, stacked array)``."""
    if path is None:
        raise InputError("--input is required")
    path = Path(path)
    if not path.exists():
        raise InputError(f"cannot read {path}")
    domain = _detect_domain(path, domain)
    if domain == "matrix":
        reader = mg.read_matrices_json if path.suffix == ".json" else mg.read_matrices_csv
        mats = reader(path)
        return domain, np.stack([np.asarray(m) for m in mats])
    kind = ConeVector if domain == "cone" else SimplexPoint
    reader = read_points_json if path.suffix == ".json" else read_points_csv
    pts = reader(path, kind)
    if not pts:
        raise InputError(f"{path} contains no points")
    return domain, np.stack([p.coords for p in pts])


def _matrix_csv(M) -> str:
    return "".join(",".join(format_number(x) for x in row) + "\n" for row in M)


def cmd_dist(args) -> int:
    domain, X = load_points(args.input, args.domain)
    D = cl.get_dissimilarity(args.metric, domain)
    if args.input2:
        _, Y = load_points(args.input2, domain)
    else:
        Y = X
    if len(X) == 2 and not args.input2:
        _write(format_number(float(D(X[0], X[1]))) + "\n", args.output)
        return EXIT_OK
    table = np.stack([np.asarray(D.func(X, y), dtype=float) for y in Y], axis=1)
    _write(_matrix_csv(table), args.output)
    return EXIT_OK


def cmd_cluster(args) -> int:
    domain, X = load_points(args.input, args.domain)
    D = cl.get_dissimilarity(args.metric, domain)
    if args.k is None:
        raise InputError("-k is required")
    if args.algo == "kcenter":
        res = cl.kcenter_cluster(X, args.k, D, T=args.iters, seed=args.seed, tol=args.tol,
                                 max_iter=args.max_iter)
    else:
        res = cl.kmeanspp_cluster(X, args.k, D, refine_rounds=args.refine_rounds, seed=args.seed)
    out = dict(res.to_dict(), algo=args.algo, metric=D.name, k=args.k)
    _write(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK


GEN_DEFAULTS = {"simplex": {"d": 9, "sigma": 0.5}, "cone": {"d": 10, "sigma": 0.5},
                "elliptope": {"d": 3, "sigma": None}, "psd": {"d": 2, "sigma": 0.1}}


def cmd_gen(args) -> int:
    if args.output in (None, "-"):
        raise InputError("gen needs --output")
    d = args.d if args.d is not None else GEN_DEFAULTS[args.kind]["d"]
    sigma = args.sigma if args.sigma is not None else GEN_DEFAULTS[args.kind]["sigma"]
    if args.kind in ("simplex", "cone"):
        spec = dg.SimplexClusterSpec(k=args.k or 3, n=args.n, d=d, sigma=sigma,
                                     noise=args.noise, seed=args.seed)
        ds = dg.gen_simplex_clusters(spec) if args.kind == "simplex" else dg.gen_positive_measures(spec)
    elif args.kind == "elliptope":
        ds = dg.gen_elliptope_clusters(args.k or 3, args.n, d, args.nu1, args.nu2, args.seed)
    else:
        ds = dg.gen_psd_clusters(args.k or 5, args.n, d, args.gamma_shape, args.gamma_scale,
                                 sigma, args.seed)
    ds.write(args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    configs = None
    if args.config:
        try:
            configs = json.loads(args.config)
        except json.JSONDecodeError as exc:
            raise InputError(f"--config is not valid JSON: {exc}") from None
        configs = configs if isinstance(configs, list) else [configs]
    runs = args.runs if args.runs is not None else 300
    report = ev.run_benchmark(args.suite, runs=runs, seed=args.seed, configs=configs,
                              refine_rounds=args.refine_rounds, T=args.iters, workers=args.workers)
    text = report.to_text()
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    out = Path(args.output)
    out.write_text(report.to_json(indent=2) + "\n")
    out.with_suffix(".txt").write_text(text)
    out.with_suffix(".csv").write_text(report.to_csv())
    sys.stdout.write(text)
    return EXIT_OK


def _parse_center(text):
    if text is None:
        return np.ones(3) / 3.0
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--center must be comma-separated numbers, got {text!r}") from None
    c = np.asarray(vals)
    if c.size != 3 or np.any(c <= 0):
        raise InputError("--center must be 3 positive coordinates (a point of the open 2-simplex)")
    return c / c.sum()


def cmd_figure(args) -> int:
    D = cl.get_dissimilarity(args.metric, "simplex")
    center = _parse_center(args.center)
    if args.figure == "ball":
        boundary = fig.ball_boundary(center, args.radius, D, n_dirs=args.directions)
        svg = fig.ball_svg(boundary, center, title=f"{D.name} ball r={format_number(args.radius)}")
        log.info("ball boundary has %d straight sides", fig.count_segments(boundary))
    else:
        svg = fig.profile_svg(center, D.func, resolution=args.resolution, step=args.contour_step,
                              title=f"{D.name} distance profile")
    _write(svg, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="CSV/JSON points, or JSON/CSV matrices")
    common.add_argument("--output", help="output path (default: stdout)")
    common.add_argument("--metric", default="hilbert")
    common.add_argument("--domain", default="auto", choices=["auto", "simplex", "cone", "matrix"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-k", type=int)
    common.add_argument("--runs", type=int)
    common.add_argument("--sigma", type=float, help="noise level (default depends on --kind)")
    common.add_argument("--noise", default="gaussian", choices=["gaussian", "student5"])
    common.add_argument("--algo", default="kmeanspp", choices=["kmeanspp", "kcenter"])
    common.add_argument("--tol", type=float, default=1e-9, help="geodesic cut tolerance")
    common.add_argument("--max-iter", type=int, default=200, help="geodesic cut bisection steps")
    common.add_argument("--refine-rounds", type=int, default=0)
    common.add_argument("--iters", type=int, default=10, help="k-center rounds T")
    common.add_argument("--contour-step", type=float, default=fig.DEFAULT_CONTOUR_STEP)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hilbert-simplex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", parents=[common], help="pairwise distances")
    d.add_argument("--input2", help="second point set (rows of the output)")
    d.set_defaults(func=cmd_dist)

    c = sub.add_parser("cluster", parents=[common], help="cluster a dataset")
    c.set_defaults(func=cmd_cluster)

    g = sub.add_parser("gen", parents=[common], help="generate a labeled dataset")
    g.add_argument("--kind", default="simplex", choices=["simplex", "cone", "elliptope", "psd"])
    g.add_argument("-n", type=int, default=50)
    g.add_argument("-d", type=int, help="dimension (default depends on --kind)")
    g.add_argument("--nu1", type=float, default=4.0)
    g.add_argument("--nu2", type=float, default=30.0)
    g.add_argument("--gamma-shape", type=float, default=2.0)
    g.add_argument("--gamma-scale", type=float, default=1.0)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", parents=[common], help="run a benchmark suite")
    b.add_argument("--suite", required=True, choices=list(ev.ALL_SUITES))
    b.add_argument("--config", help="JSON object or list restricting the configuration grid")
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("figure", parents=[common], help="SVG ball or distance profile in the 2-simplex")
    f.add_argument("figure", choices=["ball", "profile"])
    f.add_argument("--center", help="comma-separated point, default uniform")
    f.add_argument("--radius", type=float, default=0.5)
    f.add_argument("--resolution", type=int, default=200)
    f.add_argument("--directions", type=int, default=720)
    f.set_defaults(func=cmd_figure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except NotEnoughDistinctPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, GeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
