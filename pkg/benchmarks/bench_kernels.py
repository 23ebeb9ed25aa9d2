"""Compare the numba kernels with their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]

Both paths are timed in the same process; the numba path is warmed up first
so compilation is excluded. Run with PERMKIT_NO_JIT=1 to confirm that the
package still works without numba (the numba column is then skipped).
"""
import argparse
import time

import numpy as np

from permkit import _kernels
from permkit._accel import jit_enabled


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_eig3(repeat, count=20_000):
    rng = np.random.default_rng(0)
    mats = rng.normal(size=(count, 3, 3))
    t_np, ref = best_of(lambda: _kernels.eig3_batch_numpy(mats), repeat)
    row = {"case": f"eig3 batch, {count} matrices", "numpy_s": t_np}
    if jit_enabled():
        _kernels.eig3_batch_numba(mats[:4])
        t_nb, got = best_of(lambda: _kernels.eig3_batch_numba(mats), repeat)
        diff = np.abs(np.sort_complex(ref) - np.sort_complex(got))
        row.update(numba_s=t_nb, max_diff=float(diff.max()))
    return row


def bench_series(repeat, n=4, degree=10):
    rng = np.random.default_rng(1)
    g = rng.uniform(-0.5, 0.5, size=(n, n)) + np.eye(n)
    t_np, ref = best_of(lambda: _kernels.cycle_series_numpy(g, degree), repeat)
    row = {"case": f"log-det series, n={n}, degree {degree}", "numpy_s": t_np}
    if jit_enabled():
        _kernels.cycle_series_numba(g, 2)
        t_nb, got = best_of(lambda: _kernels.cycle_series_numba(g, degree), repeat)
        row.update(numba_s=t_nb, max_diff=float(np.max(np.abs(ref - got))))
    return row


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    rows = [bench_eig3(args.repeat), bench_series(args.repeat)]
    print(f"{'case':40s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max diff':>10s}")
    for r in rows:
        nb = r.get("numba_s")
        speed = f"{r['numpy_s'] / nb:8.1f}" if nb else f"{'-':>8s}"
        nbs = f"{nb:10.4f}" if nb else f"{'-':>10s}"
        diff = f"{r['max_diff']:10.1e}" if "max_diff" in r else f"{'-':>10s}"
        print(f"{r['case']:40s} {r['numpy_s']:10.4f} {nbs} {speed} {diff}")


if __name__ == "__main__":
    main()
