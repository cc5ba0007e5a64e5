"""Compare the numba and numpy implementations of the hot kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Timings are the best of
several repeats after one warm-up call (which also triggers compilation).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fracscrew import kernels
from fracscrew._accel import HAVE_NUMBA
from fracscrew.grids import CylGrid


def best_of(fn, repeat):
    fn()
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t)
    return min(ts)


def cases(size):
    g = CylGrid.default(4.0, 0.5, nr=size, ns=max(2, size // 2), ny=size)
    kd, ko, md, mo = g.strip.ymats
    rng = np.random.default_rng(1)
    theta = rng.uniform(0.1, 50.0, size=g.nr * g.ns)
    V = rng.standard_normal(g.shape)
    pts = [rng.uniform(0, hi, 20000) for hi in (g.R, g.lam, g.L)]
    (rd, ro), _, _ = g.rmats
    return {
        "dtn_profiles": lambda nb: kernels.dtn_profiles(theta, kd, ko, md, mo, use_numba=nb),
        "tri_axis": lambda nb: kernels.tri_axis(V, rd, ro, 0, use_numba=nb),
        "trilinear": lambda nb: kernels.trilinear(V, g.r, g.s, g.y, *pts, use_numba=nb),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    print(f"numba available: {HAVE_NUMBA}")
    print(f"{'kernel':<14}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, fn in cases(a.size).items():
        t_np = best_of(lambda: fn(False), a.repeat)
        if HAVE_NUMBA:
            t_nb = best_of(lambda: fn(True), a.repeat)
            print(f"{name:<14}{t_np:12.4g}{t_nb:12.4g}{t_np / t_nb:10.2f}")
        else:
            print(f"{name:<14}{t_np:12.4g}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
