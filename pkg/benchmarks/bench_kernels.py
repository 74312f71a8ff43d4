#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot loops, per-pair long-link sampling and shortest-path
flooding, on growing diamond grids and prints a comparison table.

    python3 benchmarks/bench_kernels.py [--radii 8,16,24] [--repeats 5]
"""

import argparse
import time

import numpy as np

from gridfork import GridShape, build_topology
from gridfork._kernels import available_backends


def _best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_shape(radius, repeats, backends):
    shape = GridShape.diamond(radius)
    nodes = shape.nodes()
    n = len(nodes)
    xs = np.asarray([v[0] for v in nodes], dtype=np.int32)
    ys = np.asarray([v[1] for v in nodes], dtype=np.int32)
    uniforms = np.random.default_rng(0).random(n * (n - 1) // 2)

    topo = build_topology(shape, 1.0, seed=0)
    indptr, indices, is_long = topo.csr()
    weights = np.where(is_long, 1.5, 1.0)

    rows = []
    for name, mod in backends.items():
        t_sample = _best_of(lambda: mod.sample_long_edges(xs, ys, 1.0, None, uniforms), repeats)
        t_path = _best_of(lambda: mod.dijkstra(indptr, indices, weights, 0), repeats)
        rows.append((name, t_sample, t_path))
    return n, len(topo.long_edges), rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--radii", default="8,16,24")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'grid':>12} {'nodes':>6} {'edges':>6} {'backend':>8} "
          f"{'sample_ms':>10} {'dijkstra_ms':>12} {'speedup':>8}")
    for radius in (int(r) for r in args.radii.split(",")):
        n, m, rows = bench_shape(radius, args.repeats, backends)
        base = {name: (ts, tp) for name, ts, tp in rows}.get("pure")
        for name, t_sample, t_path in rows:
            speed = ""
            if name != "pure" and base:
                speed = f"{(base[0] + base[1]) / (t_sample + t_path):5.1f}x"
            print(f"{'diamond:' + str(radius):>12} {n:>6} {m:>6} {name:>8} "
                  f"{t_sample * 1e3:>10.2f} {t_path * 1e3:>12.2f} {speed:>8}")


if __name__ == "__main__":
    main()
