#!/usr/bin/env python3
"""Head-to-head timing of the compiled kernels against the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from gdlayout import kernels
from gdlayout.graphs import generate_balanced_tree, generate_grid
from gdlayout.optimizer import CrossingGuard, init_layout
from gdlayout.rng import Xoshiro256StarStar
from gdlayout.sampling import stress_items
from gdlayout.graphs import DistanceMatrix


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_stress_batch(backend, repeat):
    g = generate_balanced_tree(2, 9)
    dist = DistanceMatrix(g)
    I, J, D = stress_items(g, dist)
    X = init_layout(g.n, 0)
    rng = Xoshiro256StarStar(1)
    pick = np.array([rng.below(len(I)) for _ in range(32)])
    out = np.zeros_like(X)
    Ib, Jb, Db = I[pick], J[pick], D[pick]

    def run():
        for _ in range(2000):
            backend.stress_batch(X, Ib, Jb, Db, out, 1.0)

    return timeit(run, repeat) / 2000


def bench_edge_len_batch(backend, repeat):
    g = generate_grid(12, 24)
    e = g.edge_array()
    X = init_layout(g.n, 0)
    L = np.ones(len(e))
    out = np.zeros_like(X)
    I, J = e[:, 0][:32].copy(), e[:, 1][:32].copy()
    Lb = L[:32]

    def run():
        for _ in range(2000):
            backend.edge_len_batch(X, I, J, Lb, out, 1.0)

    return timeit(run, repeat) / 2000


def bench_bruteforce_crossings(backend, repeat):
    g = generate_grid(12, 24)
    X = init_layout(g.n, 3)
    segs = np.hstack([X[g.edge_array()[:, 0]], X[g.edge_array()[:, 1]]])
    nodes = g.edge_array()

    def run():
        backend.pairs_cross_bruteforce(segs, nodes)

    return timeit(run, repeat)


def bench_guard_moves(backend, repeat):
    # thin proxy for the safe-update hot loop: one node's incident edges
    # re-tested against the rest
    g = generate_grid(6, 6)
    X = init_layout(g.n, 2)
    e = g.edge_array()
    segs = np.hstack([X[e[:, 0]], X[e[:, 1]]])
    inc = np.array([0, 1, 2, 3])
    mask = np.ones(len(segs), dtype=bool)
    mask[inc] = False

    def run():
        for _ in range(1000):
            backend.cross_vs(segs[inc], e[inc], segs[mask], e[mask])

    return timeit(run, repeat) / 1000


BENCHES = [
    ("stress_batch (m=32)", bench_stress_batch),
    ("edge_len_batch (m=32)", bench_edge_len_batch),
    ("bruteforce crossings (540 edges)", bench_bruteforce_crossings),
    ("incident-vs-rest crossing test", bench_guard_moves),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.backends()
    names = [b.BACKEND for b in backends]
    print(f"backends: {', '.join(names)}\n")
    width = max(len(n) for n, _ in BENCHES)
    header = "benchmark".ljust(width) + "".join(f"{n:>14}" for n in names)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn in BENCHES:
        times = [fn(b, args.repeat) for b in backends]
        row = label.ljust(width) + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) > 1:
            row += f"{times[-1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
