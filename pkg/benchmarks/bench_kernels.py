"""Time the compiled kernels against the pure Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--batch 20000]

Each kernel is run on identical inputs under both backends; outputs are
compared for exact equality before timings are reported.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from nemx import _pykernels

try:
    from nemx import _ckernels
except ImportError:
    _ckernels = None

MU_TOL, BALANCE_TOL, MAX_ITER = 1e-9, 1e-7, 200


def batch_inputs(rng, n, m=4):
    a = rng.uniform(0.1, 2.0, m)
    b = rng.uniform(0.05, 1.0, m)
    d_max = np.minimum(rng.uniform(0.5, 5.0, m), a / b)
    retail = rng.uniform(0.05, 1.0, n)
    sell = retail * rng.uniform(0.0, 1.0, n)
    r = rng.uniform(0.0, d_max.sum() + 0.5, n)
    return a, b, d_max, retail, sell, r


def cases(rng, batch):
    args = batch_inputs(rng, batch)
    f = rng.normal(size=3000)
    g = rng.normal(size=2000)
    return {
        f"schedule_batch (4 devices x {batch})": (
            lambda k: k.schedule_batch(*args, MU_TOL, BALANCE_TOL, MAX_ITER)),
        "maxplus_convolve (3000 x 2000)": lambda k: k.maxplus_convolve(f, g),
    }


def same(x, y):
    if isinstance(x, tuple):
        return all(same(p, q) for p, q in zip(x, y))
    return np.array_equal(np.asarray(x), np.asarray(y), equal_nan=True)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--batch", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<40}{'cython (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for name, fn in cases(rng, args.batch).items():
        if not same(fn(_ckernels), fn(_pykernels)):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        t_p = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        print(f"{name:<40}{t_c:>12.4f}{t_p:>12.4f}{t_p / t_c:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
