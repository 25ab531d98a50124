"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both implementations are imported directly, so the result does not depend
on ``CTSA_PURE_PYTHON``.  Prints one line per kernel with the best time of
each implementation and the speed-up.
"""
import argparse
import time

import numpy as np

from ctsa import _pykernels

try:
    from ctsa import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(seed=0):
    rng = np.random.default_rng(seed)
    # Gaussian bump plus noise, fitted from a rough start
    x = np.arange(400, dtype=np.float64)
    y = 3.0 * np.exp(-((x - 180) ** 2) / (2 * 40.0**2)) + 0.5 + rng.normal(0, 0.05, len(x))
    p0 = np.array([2.0, 150.0, 60.0, 0.0])
    # two misaligned segmentations of 20k points
    ends1 = np.unique(np.r_[np.sort(rng.choice(np.arange(1, 20_000), 1500, replace=False)), 20_000])
    ends2 = np.unique(np.r_[np.sort(rng.choice(np.arange(1, 20_000), 1500, replace=False)), 20_000])
    fes1 = rng.uniform(0, 2, len(ends1))
    fes2 = rng.uniform(0, 2, len(ends2))
    walk = np.cumsum(rng.normal(size=3000))
    return {
        "gauss_lm": lambda k: k.gauss_lm(x, y, p0),
        "os_partition": lambda k: k.os_partition(ends1, fes1, ends2, fes2),
        "sw_poly": lambda k: k.sw_poly(walk, 2, 5.0, 0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'kernel':<14}{'python (s)':>12}{'cython (s)':>12}{'speed-up':>10}")
    for name, call in cases().items():
        tp = _best(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<14}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        tc = _best(lambda: call(_ckernels), args.repeat)
        print(f"{name:<14}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
