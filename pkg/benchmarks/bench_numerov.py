"""Timing of the Numerov kernel backends and of the oracle pipeline built on it.

    python3 benchmarks/bench_numerov.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from xmjacobi import _kernels
from xmjacobi.params import FamilyParams
from xmjacobi.radial_oracle import shoot_bound_states, verify_s_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernel(n, repeat):
    h = 35.0 / n
    r = h * np.arange(1, n + 1)
    f = 6.0 / r**2 - 12.0 / np.cosh(r) ** 2 - 1.0
    seed = np.zeros(n)
    seed[0], seed[1] = r[0] ** 3, r[1] ** 3

    results = {}
    backends = {"python": _kernels.numerov_python}
    if _kernels.numerov_compiled is not None:
        backends["cython"] = _kernels.numerov_compiled
    for name, kernel in backends.items():
        results[name] = best_of(lambda: kernel(f, seed.copy(), h * h, _kernels.RESCALE_LIMIT), repeat)
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=35_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"active backend: {_kernels.BACKEND}")
    res = bench_kernel(args.points, args.repeat)
    for name, t in res.items():
        print(f"kernel {name:>6}: {t * 1e3:8.2f} ms for {args.points} points")
    if "cython" in res:
        print(f"speedup: {res['python'] / res['cython']:.1f}x")

    p = FamilyParams(1, 10, 2)
    t = best_of(lambda: shoot_bound_states(p), 1)
    print(f"shoot_bound_states(1, 10, 2): {t:.3f} s")
    t = best_of(lambda: verify_s_matrix(p, [0.5, 1.0, 2.0, 4.0]), 1)
    print(f"verify_s_matrix(1, 10, 2), 4 k-values: {t:.3f} s")


if __name__ == "__main__":
    main()
