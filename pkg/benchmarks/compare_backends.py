#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Loads both backends side by side (no env flag needed) and times the hot
kernels on matched workloads, printing a speedup table. First numba timings
exclude JIT compilation (warm-up calls run first).

Usage: python benchmarks/compare_backends.py [--quick]
"""
import argparse
import time

import numpy as np

from pwspd._engine import load_backend
from pwspd.core import make_rng


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def build_csr(eng, pts, k):
    idx, dst = eng.knn_brute_points(pts, k)
    return eng.knn_to_csr(idx, dst, pts.shape[0])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()

    nb = load_backend("numba")
    np_ = load_backend("numpy")
    rng = make_rng(0xBE9C)

    scale = 0.4 if args.quick else 1.0
    n_knn = int(4000 * scale)
    n_dense = int(700 * scale)
    n_csr = int(1500 * scale)

    pts = rng.random((n_knn, 2))
    small = rng.random((200, 2))
    w_dense = rng.random((n_dense, n_dense))
    w_dense = w_dense + w_dense.T
    np.fill_diagonal(w_dense, 0.0)
    csr_pts = rng.random((n_csr, 2))

    # warm up the JIT so compile time is not measured
    nb.knn_grid_points(small, 8)
    ip, ix, ln = build_csr(nb, small, 8)
    nb.dijkstra_csr_ap(ip, ix, ln**2.0, 200)
    nb.dijkstra_dense_ap(w_dense[:50, :50].copy())
    nb.minimax_csr_ap(ip, ix, ln, 200)
    d200 = np.sqrt(((small[:, None] - small[None]) ** 2).sum(-1))
    nb.spanner_knn_scan(ip, ix, ln**2.0, 200, d200**2.0, d200, 2.0, 1.0, 1e-10)

    rows = []

    t_np = timeit(np_.knn_brute_points, pts, 32)
    t_nb = timeit(nb.knn_brute_points, pts, 32)
    t_grid = timeit(nb.knn_grid_points, pts, 32)
    rows.append((f"knn brute n={n_knn} k=32", t_np, t_nb))
    rows.append((f"knn grid  n={n_knn} k=32", t_np, t_grid))

    t_np = timeit(np_.dijkstra_dense_ap, w_dense, repeat=1)
    t_nb = timeit(nb.dijkstra_dense_ap, w_dense)
    rows.append((f"dense all-pairs n={n_dense}", t_np, t_nb))

    ip, ix, ln = build_csr(nb, csr_pts, 16)
    w = ln**2.0
    t_np = timeit(np_.dijkstra_csr_ap, ip, ix, w, n_csr, repeat=1)
    t_nb = timeit(nb.dijkstra_csr_ap, ip, ix, w, n_csr)
    rows.append((f"csr all-pairs n={n_csr} k=16", t_np, t_nb))

    t_np = timeit(np_.minimax_csr_ap, ip, ix, ln, n_csr, repeat=1)
    t_nb = timeit(nb.minimax_csr_ap, ip, ix, ln, n_csr)
    rows.append((f"minimax all-pairs n={n_csr}", t_np, t_nb))

    d = np.sqrt(((csr_pts[:, None] - csr_pts[None]) ** 2).sum(-1))
    np.fill_diagonal(d, 0.0)
    t_np = timeit(
        np_.spanner_knn_scan, ip, ix, w, n_csr, d**2.0, d, 2.0, 1.0, 1e-10,
        repeat=1,
    )
    t_nb = timeit(
        nb.spanner_knn_scan, ip, ix, w, n_csr, d**2.0, d, 2.0, 1.0, 1e-10
    )
    rows.append((f"spanner scan n={n_csr} k=16", t_np, t_nb))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:{width}}  {t_np:>9.3f}s  {t_nb:>9.3f}s  {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
