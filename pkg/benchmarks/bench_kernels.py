"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from ehcoop import energy
from ehcoop._accel import HAVE_NUMBA
from ehcoop.mcsim import kernels


def _cases(rng):
    n = 500
    counts = rng.poisson(150, n)
    m = int(counts.sum())
    u, fad, g2 = rng.random(m), rng.standard_exponential(m), np.full(n, 25.0)
    r2 = rng.uniform(0, 1e4, m)
    tc, uc = rng.poisson(120, 100), rng.poisson(60, 100)
    txy = rng.uniform(-60, 60, (int(tc.sum()), 2))
    uxy = rng.uniform(-60, 60, (int(uc.sum()), 2))
    attempt, harvest = rng.random(1_000_000) < 0.8, rng.random(1_000_000) < 0.5
    return {
        "buffer_levels (1e6 slots)": (energy._buffer_levels_jit, energy._buffer_levels_numpy, (attempt, harvest, 5, 0)),
        "annulus_interference (500 trials)": (kernels._annulus_interference_jit, kernels._annulus_interference_numpy, (counts, u, fad, g2, 1e4, 2.0, 1.0)),
        "field_cluster (500 trials, K=3)": (kernels._field_cluster_jit, kernels._field_cluster_numpy, (counts, r2, fad, np.empty(0), 1.0, 3, 2.0)),
        "count_candidates (100 trials, K=2)": (kernels._count_candidates_jit, kernels._count_candidates_numpy, (tc, txy, uc, uxy, 2, 10.0)),
    }


def _best(fn, args, repeat):
    fn(*args)  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba not importable; both columns time the same python code")
    print(f"{'kernel':<36}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, (jit, ref, a) in _cases(np.random.default_rng(0)).items():
        tj, tn = _best(jit, a, args.repeat), _best(ref, a, args.repeat)
        print(f"{name:<36}{tj * 1e3:>12.2f}{tn * 1e3:>12.2f}{tn / tj:>10.1f}")


if __name__ == "__main__":
    main()
