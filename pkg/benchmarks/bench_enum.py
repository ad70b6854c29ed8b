#!/usr/bin/env python3
"""Benchmark the word-enumeration kernels: compiled extension vs pure Python.

Usage: python3 benchmarks/bench_enum.py [--depth 7] [--repeats 3]
"""

import argparse
import time

import numpy as np

from wtdecode import enumcore
from wtdecode.enumcore import StateMachine, run_walk, word_counts
from wtdecode.probsource import random_tabular_model


def time_backend(sm, depth, backend, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        per_wl, per_wt, _ = run_walk(sm, depth, compute_wt=True, collect=False,
                                     backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, float(sum(per_wt.tolist()))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--depth", type=int, default=7)
    parser.add_argument("--n-b", type=int, default=3)
    parser.add_argument("--n-i", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    model = random_tabular_model(rng, n_b=args.n_b, n_i=args.n_i, order=2)
    sm = StateMachine(model, ())
    n_words, _ = word_counts(args.n_b, args.n_i, args.depth)
    print(f"selected backend at import: {enumcore.BACKEND}")
    print(f"model |V_B|={args.n_b} |V_I|={args.n_i} order=2, depth {args.depth} "
          f"-> {n_words:,} words")

    rows = []
    for backend in ("python", "cython"):
        try:
            seconds, wt_mass = time_backend(sm, args.depth, backend, args.repeats)
        except KeyError:
            print(f"{backend:>8}: unavailable")
            continue
        rows.append((backend, seconds, wt_mass))
        rate = n_words / seconds / 1e6
        print(f"{backend:>8}: {seconds * 1e3:9.1f} ms   {rate:7.2f} Mwords/s   "
              f"WT mass {wt_mass:.9f}")
    if len(rows) == 2:
        print(f"speedup: {rows[0][1] / rows[1][1]:.0f}x")
        assert rows[0][2] == rows[1][2], "backends disagree"


if __name__ == "__main__":
    main()
