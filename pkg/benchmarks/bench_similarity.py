#!/usr/bin/env python3
"""Benchmark the compiled similarity kernel against the pure-Python twin.

Usage: python3 benchmarks/bench_similarity.py [--pairs N] [--length L]
"""

import argparse
import random
import time

from ctxcollapse import _gestalt_py
from ctxcollapse.similarity import BACKEND, match_total


def make_pairs(n, length, seed=0):
    rng = random.Random(seed)
    alphabet = "abcdefghijklmnop0123456789"
    return [
        (
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, length))),
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, length))),
        )
        for _ in range(n)
    ]


def bench(fn, pairs, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        total = 0
        for a, b in pairs:
            total += fn(a, b)
        best = min(best, time.perf_counter() - start)
    return best, total


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=20_000)
    parser.add_argument("--length", type=int, default=32)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.length)
    py_time, py_total = bench(_gestalt_py.match_total, pairs)
    active_time, active_total = bench(match_total, pairs)
    if py_total != active_total:
        raise SystemExit("backends disagree; benchmark aborted")

    print(f"pairs={args.pairs} max_length={args.length}")
    print(f"pure python : {py_time:.3f}s")
    print(f"{BACKEND:<12}: {active_time:.3f}s")
    if BACKEND != "python":
        print(f"speedup     : {py_time / active_time:.1f}x")


if __name__ == "__main__":
    main()
