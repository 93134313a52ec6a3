"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends run on the same inputs; the script also checks that their
results agree before reporting timings.
"""

import argparse
import json
import timeit

import numpy as np

from hilbert_simplex import _pykernels as py
from hilbert_simplex import kernels

try:
    from hilbert_simplex import _ckernels as cy
except ImportError:  # extension not built
    cy = None

CODES = {"hilbert": kernels.HILBERT, "fhr": kernels.FHR, "l1": kernels.L1,
         "euc": kernels.EUC, "kl": kernels.KL_ETA}


def cases(rng):
    X = rng.dirichlet(np.ones(10), 2000)
    big = rng.dirichlet(np.ones(256), 2000)
    small = rng.dirichlet(np.ones(10), 100)
    for name, code in CODES.items():
        yield f"one_to_many d=9 n=2000 {name}", lambda m, c=code: m.one_to_many(X, X[0], c)
        yield f"one_to_many d=255 n=2000 {name}", lambda m, c=code: m.one_to_many(big, big[0], c)
    yield "pairwise d=9 200x200 hilbert", lambda m: m.pairwise(X[:200], X[:200], kernels.HILBERT)
    for name in ("hilbert", "fhr", "kl"):
        code = CODES[name]
        yield f"walk_center n=100 T=1000 {name}", lambda m, c=code: m.walk_center(small, c, 1000, 0, 1e-9, 200)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write timings to this file")
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not available; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':42s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, fn in cases(rng):
        np.testing.assert_allclose(fn(cy), fn(py), rtol=1e-7, atol=1e-7)
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        rows.append({"case": label, "python_ms": tp, "cython_ms": tc, "speedup": tp / tc})
        print(f"{label:42s} {tp:10.3f} {tc:10.3f} {tp / tc:8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
