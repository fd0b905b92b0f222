#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python kernel backends.

Runs each kernel a few times per backend and reports the best wall time,
plus a correctness cross-check so a speedup is never quoted for code
computing something different.

Usage:
    python benchmarks/bench_backends.py [--draws N] [--solves N] [--betas N]
"""

import argparse
import time

import numpy as np

from dlgdkit._kernels import _pyref

try:
    from dlgdkit._kernels import _speedups
except ImportError:
    _speedups = None


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_stream(backends, n):
    jobs = {name: (lambda mod=mod: mod.normal_stream(12345, n)) for name, mod in backends}
    results = {name: best_of(job) for name, job in jobs.items()}
    if len(backends) == 2:
        a = backends[0][1].normal_stream(12345, min(n, 100_000))
        b = backends[1][1].normal_stream(12345, min(n, 100_000))
        assert a.tobytes() == b.tobytes(), "stream mismatch between backends"
    return f"normal_stream, {n:,} draws", results


def bench_ols(backends, solves):
    rng = np.random.default_rng(7)
    problems = [
        (rng.normal(size=(200, 8)), rng.normal(size=200)) for _ in range(solves)
    ]

    def run(mod):
        for X, y in problems:
            mod.ols_solve(X, y)

    results = {name: best_of(lambda mod=mod: run(mod)) for name, mod in backends}
    if len(backends) == 2:
        X, y = problems[0]
        b1, _, _ = backends[0][1].ols_solve(X, y)
        b2, _, _ = backends[1][1].ols_solve(X, y)
        assert np.allclose(b1, b2, rtol=1e-10), "OLS mismatch between backends"
    return f"ols_solve, {solves} problems of 200x8", results


def bench_incbeta(backends, evals):
    rng = np.random.default_rng(11)
    args = list(
        zip(
            rng.uniform(0.5, 40.0, evals),
            rng.uniform(0.5, 40.0, evals),
            rng.uniform(0.01, 0.99, evals),
        )
    )

    def run(mod):
        for a, b, x in args:
            mod.reg_inc_beta(a, b, x)

    results = {name: best_of(lambda mod=mod: run(mod)) for name, mod in backends}
    return f"reg_inc_beta, {evals:,} evaluations", results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--draws", type=int, default=1_000_000)
    parser.add_argument("--solves", type=int, default=200)
    parser.add_argument("--betas", type=int, default=50_000)
    args = parser.parse_args()

    backends = [("python", _pyref)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    else:
        print("note: compiled extension not available; timing pure Python only\n")

    rows = [
        bench_stream(backends, args.draws),
        bench_ols(backends, args.solves),
        bench_incbeta(backends, args.betas),
    ]

    width = max(len(label) for label, _ in rows)
    header = f"{'kernel':<{width}}  " + "".join(
        f"{name:>12}" for name, _ in backends
    )
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, results in rows:
        line = f"{label:<{width}}  " + "".join(
            f"{results[name] * 1e3:>10.1f}ms" for name, _ in backends
        )
        if len(backends) == 2:
            line += f"{results['python'] / results['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
