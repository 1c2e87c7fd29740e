#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs each hot kernel on a representative workload with both backends and
prints a table of per-call times and speedups.  Usage:

    python benchmarks/bench_kernels.py [--repeat N] [--size PIXELS]
"""

import argparse
import time

import numpy as np

from mammocad import _kernels_py
from mammocad.wavelet import daubechies4

try:
    from mammocad import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads(size):
    g = np.random.default_rng(0)
    bank = daubechies4()
    h = np.ascontiguousarray(bank.analysis_low)
    bank_g = np.ascontiguousarray(bank.analysis_high)
    x = g.normal(0.0, 100.0, (size, size))
    lo = g.normal(0.0, 100.0, (size, size // 2))
    hi = g.normal(0.0, 100.0, (size, size // 2))
    grid = g.normal(0.0, 100.0, (size, size))
    origins = np.arange(0, size - 31, 16, dtype=np.int64)
    mask = (g.uniform(0.0, 1.0, (size, size)) > 0.7).astype(np.uint8)
    return [
        ("dwt_rows", lambda k: k.dwt_rows(x, h, bank_g)),
        ("idwt_rows", lambda k: k.idwt_rows(lo, hi, h, bank_g)),
        ("atrous_rows step=4", lambda k: k.atrous_rows(x, h, 4)),
        ("window_moments 32x32",
         lambda k: k.window_moments(grid, origins, origins, 32, 32)),
        ("label_components", lambda k: k.label_components(mask)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions, best-of (default 5)")
    parser.add_argument("--size", type=int, default=512,
                        help="square workload size in pixels (default 512)")
    args = parser.parse_args()

    print("workload: %dx%d float64, best of %d runs"
          % (args.size, args.size, args.repeat))
    if _compiled is None:
        print("compiled kernels not built; timing the numpy fallback only")
    header = ("kernel", "numpy (ms)", "compiled (ms)", "speedup")
    rows = []
    for name, call in workloads(args.size):
        t_py = best_of(lambda: call(_kernels_py), args.repeat)
        if _compiled is not None:
            t_c = best_of(lambda: call(_compiled), args.repeat)
            rows.append((name, "%8.3f" % (t_py * 1e3),
                         "%8.3f" % (t_c * 1e3), "%6.2fx" % (t_py / t_c)))
        else:
            rows.append((name, "%8.3f" % (t_py * 1e3), "       -", "     -"))

    widths = [max(len(str(r[i])) for r in rows + [header])
              for i in range(4)]
    fmt = "  ".join("%%-%ds" % w for w in widths)
    print(fmt % header)
    print(fmt % tuple("-" * w for w in widths))
    for row in rows:
        print(fmt % row)


if __name__ == "__main__":
    main()
