"""Compiled vs numpy kernels on the Lambda-weighted exponential sum.

    python benchmarks/bench_kernels.py [--n 1000000] [--l 8] [--repeat 3]

Prints one line per backend (best of --repeat) and the largest difference between
the two results.
"""

import argparse
import time

import numpy as np

from beatty_lab import _pykernels, kernels
from beatty_lab.irrational import Surd
from beatty_lab.primes import prime_powers_upto


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--l", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    ns, ws = prime_powers_upto(args.n)
    theta = Surd.sqrt(2)
    ls = range(1, args.l + 1)
    terms = len(ns) * args.l
    print(f"N={args.n}  prime powers={len(ns)}  L={args.l}  terms={terms}  threads={args.threads}")

    backends = [("numpy", _pykernels)]
    if kernels.BACKEND == "cython":
        backends.insert(0, ("cython", kernels.backend))
    else:
        print("compiled extension not built; numpy only")
    results = {}
    for name, kern in backends:
        secs, out = best_of(lambda: kernels.weighted_exp_sums(ns, ws, theta, ls, args.threads, kern), args.repeat)
        results[name] = (secs, out)
        print(f"{name:>7}: {secs:8.4f} s  {secs / terms * 1e9:7.2f} ns/term")
    if len(results) == 2:
        (tc, c), (tp, p) = results["cython"], results["numpy"]
        rel = np.max(np.abs(c - p) / np.maximum(np.abs(p), 1.0))
        print(f"speedup {tp / tc:.1f}x   max relative difference {rel:.2e}")


if __name__ == "__main__":
    main()
