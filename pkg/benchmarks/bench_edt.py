"""Compare the compiled and pure-Python distance-transform kernels.

Both kernels implement the same two-pass lower-envelope algorithm and
must return identical arrays; this script checks that and reports the
speedup on a range of grid sizes.

Usage: python benchmarks/bench_edt.py [--sizes 64,256,512] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lusa.raster import _edt_py

try:
    from lusa.raster import _edt_cy
except ImportError:
    _edt_cy = None


def bench(func, targets, repeat):
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        result = func(targets)
        best = min(best, time.perf_counter() - started)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,128,256,512",
                        help="comma-separated square grid sizes")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions (best is reported)")
    parser.add_argument("--density", type=float, default=0.05,
                        help="fraction of target cells")
    args = parser.parse_args()

    if _edt_cy is None:
        print("compiled kernel not available; showing pure Python only")

    rng = np.random.default_rng(42)
    print(f"{'size':>6} {'python':>12} {'cython':>12} {'speedup':>9}")
    for size in (int(s) for s in args.sizes.split(",")):
        targets = rng.random((size, size)) < args.density
        targets[size // 2, size // 2] = True
        py_time, py_out = bench(_edt_py.squared_edt, targets, args.repeat)
        if _edt_cy is None:
            print(f"{size:>6} {py_time * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
            continue
        cy_time, cy_out = bench(_edt_cy.squared_edt, targets, args.repeat)
        if not np.array_equal(py_out, cy_out):
            raise SystemExit(f"kernel outputs differ at size {size}")
        print(f"{size:>6} {py_time * 1e3:>10.2f}ms {cy_time * 1e3:>10.2f}ms "
              f"{py_time / cy_time:>8.1f}x")


if __name__ == "__main__":
    main()
