"""Timing comparison for the point-block evaluation kernels.

Runs the same Σ|f_i|² workload through the numba backend and the pure
numpy fallback and reports throughput for both.  The certificate search
calls these kernels with millions of points, so the ratio here is the
ratio of end-to-end certification time.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeats K]
"""
import argparse
import time

import numpy as np

from polytoep.kernels import _HAVE_NUMBA, pack_tuple, sumsq_block
from polytoep.poly import exact_poly, symbols


def sample_tuple():
    # degree-3 bivariate pair, dense enough to be representative
    f = exact_poly(2, {(3, 0): 1, (1, 1): -2, (0, 2): 1, (0, 0): "1/4"})
    g = exact_poly(2, {(2, 1): 1, (1, 0): 3, (0, 0): -1})
    return symbols(2, f, g)


def run(backend, pk, pts, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = sumsq_block(pk, pts, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=2_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    pk = pack_tuple(sample_tuple())
    rng = np.random.default_rng(0)
    pts = (rng.uniform(-1, 1, (args.points, 2))
           + 1j * rng.uniform(-1, 1, (args.points, 2)))

    if _HAVE_NUMBA:
        sumsq_block(pk, pts[:1000], backend="numba")  # JIT warm-up
    t_np, out_np = run("numpy", pk, pts, args.repeats)
    print(f"numpy : {t_np:8.4f} s   {args.points / t_np / 1e6:7.1f} Mpts/s")
    if not _HAVE_NUMBA:
        print("numba : unavailable (not installed or POLYTOEP_DISABLE_NUMBA=1)")
        return
    t_nb, out_nb = run("numba", pk, pts, args.repeats)
    print(f"numba : {t_nb:8.4f} s   {args.points / t_nb / 1e6:7.1f} Mpts/s")
    print(f"speedup: {t_np / t_nb:.2f}x")
    worst = float(np.max(np.abs(out_np - out_nb)))
    print(f"max |numpy - numba|: {worst:.3e}")
    assert worst < 1e-9 * max(1.0, float(np.max(out_np)))


if __name__ == "__main__":
    main()
