"""Time the compiled kernels against the NumPy fallback on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each row reports the best-of-``repeat`` wall time per backend, the speedup and
the max abs difference between the two outputs.
"""
import argparse
import json
import time

import numpy as np

from polyxform import _kernels_py

try:
    from polyxform import _kernels as _kc
except ImportError:
    _kc = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    # multilinear interpolation on a 2-D grid, as used by the operator quadrature
    shape = np.array([961, 961], dtype=np.int64)
    vals = rng.normal(size=int(shape.prod()))
    lower, h = np.array([-6.0, -6.0]), np.array([0.0125, 0.0125])
    pts = np.ascontiguousarray(rng.uniform(-6, 6, (400_000, 2)))
    yield "interp_linear 2-D, 4e5 pts", "interp_linear", (vals, shape, lower, h, pts)

    shape3 = np.array([64, 64, 64], dtype=np.int64)
    vals3 = rng.normal(size=int(shape3.prod()))
    pts3 = np.ascontiguousarray(rng.uniform(0, 63, (200_000, 3)))
    yield "interp_linear 3-D, 2e5 pts", "interp_linear", (vals3, shape3, np.zeros(3), np.ones(3), pts3)

    occ = rng.random(int(shape.prod()))
    yield "grid_lookup 2-D, 4e5 pts", "grid_lookup", (occ, shape, lower, h, pts)

    A, m = 3, 40
    phi = np.ascontiguousarray(rng.normal(size=(1, A, m, A)))
    counts = np.full(A, m, dtype=np.int64)
    w = rng.random((A, m))
    yield "vandermonde_abs_sum A=3, 6.4e4 tuples", "vandermonde_abs_sum", (phi, counts, w)

    A, m = 2, 600
    phi = np.ascontiguousarray(rng.normal(size=(2, A, m, A)))
    counts = np.full(A, m, dtype=np.int64)
    w = rng.random((A, m))
    yield "vandermonde_abs_sum A=2 n'=2, 3.6e5 tuples", "vandermonde_abs_sum", (phi, counts, w)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the rows as JSON")
    args = ap.parse_args(argv)
    if _kc is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(args.seed)
    rows = []
    print(f"{'kernel':45s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, inputs in cases(rng):
        tc, oc = best_of(lambda: getattr(_kc, name)(*inputs), args.repeat)
        tp, op = best_of(lambda: getattr(_kernels_py, name)(*inputs), args.repeat)
        diff = float(np.max(np.abs(np.asarray(oc) - np.asarray(op))))
        rows.append({"kernel": label, "cython_s": tc, "python_s": tp, "speedup": tp / tc,
                     "max_abs_diff": diff})
        print(f"{label:45s} {tc * 1e3:12.2f} {tp * 1e3:12.2f} {tp / tc:8.1f} {diff:10.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
