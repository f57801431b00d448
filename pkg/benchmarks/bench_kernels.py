"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot kernels on identical inputs at a few problem sizes,
then an end-to-end solve per backend (each in a subprocess so the
OTREG_BACKEND env flag takes effect at import time).

Usage: python3 benchmarks/bench_kernels.py [--sizes 1000,5000,20000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from otreg.geometry import ConvexPolygon  # noqa: E402
from otreg.kernels import _numpy as knp  # noqa: E402
from otreg.solver import _neighbor_graph, sample_target  # noqa: E402

try:
    from otreg.kernels import _numba as knb
except ImportError:
    knb = None

SQUARE = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def cell_inputs(n, seed=0):
    cloud = sample_target(SQUARE, n, seed=seed, lloyd_iters=3)
    pts = cloud.points
    rng = np.random.default_rng(seed + 1)
    w = 0.01 * rng.standard_normal(n)
    indptr, indices = _neighbor_graph(pts, w)
    ii = np.repeat(np.arange(n), np.diff(indptr))
    normals = np.ascontiguousarray(pts[indices] - pts[ii])
    p2 = np.sum(pts ** 2, axis=1)
    offsets = np.ascontiguousarray(
        0.5 * (p2[indices] - p2[ii] - w[indices] + w[ii]))
    dom = np.ascontiguousarray(SQUARE.vertices)
    maxv = len(dom) + int(np.diff(indptr).max()) + 4
    return normals, offsets, indptr, indices, dom, maxv, pts


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernels(sizes):
    print(f"{'kernel':<14} {'n':>7} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for n in sizes:
        normals, offsets, indptr, indices, dom, maxv, pts = cell_inputs(n)
        rng = np.random.default_rng(3)
        xs = rng.random((n, 2))
        slopes, inter = pts, 0.5 * np.sum(pts ** 2, axis=1)
        verts, elabels, nv, _, _ = knp.clip_cells(normals, offsets, indptr,
                                                  indices, dom, maxv)
        cases = {
            "clip_cells": (normals, offsets, indptr, indices, dom, maxv),
            "eval_argmax": (xs, slopes, inter),
            "edge_lengths": (verts, elabels, nv),
        }
        for name, args in cases.items():
            t_np = best_of(lambda: getattr(knp, name)(*args))
            if knb is not None:
                getattr(knb, name)(*args)  # warm up the JIT
                t_nb = best_of(lambda: getattr(knb, name)(*args))
                print(f"{name:<14} {n:>7} {t_np:>9.4f}s {t_nb:>9.4f}s "
                      f"{t_np / t_nb:>7.1f}x")
            else:
                print(f"{name:<14} {n:>7} {t_np:>9.4f}s {'n/a':>10} {'':>8}")


SOLVE_SNIPPET = """
import time
from otreg import kernels
from otreg.geometry import ConvexPolygon
from otreg.solver import newton_solve, sample_target
square = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
cloud = sample_target(square, {n}, seed=0)
newton_solve(square, cloud)  # warm up
t0 = time.perf_counter()
newton_solve(square, cloud)
print(f"solve n={n} backend={{kernels.BACKEND}}: "
      f"{{time.perf_counter() - t0:.2f}}s")
"""


def bench_solve(n):
    for backend in ("numpy", "numba"):
        env = dict(os.environ, OTREG_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c",
                              SOLVE_SNIPPET.format(n=n)],
                             env=env, capture_output=True, text=True)
        out = res.stdout.strip() or res.stderr.strip().splitlines()[-1]
        print(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1000,5000,20000")
    ap.add_argument("--solve-n", type=int, default=5000)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_kernels(sizes)
    print()
    bench_solve(args.solve_n)


if __name__ == "__main__":
    main()
