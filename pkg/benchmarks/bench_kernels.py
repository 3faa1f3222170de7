"""Compare the compiled and pure-Python heat-bath loops on the same draws.

    python3 benchmarks/bench_kernels.py --n 20 --sweeps 200
"""

import argparse
import time

import numpy as np

from hardcore import _pykernels
from hardcore.lattice import Box
from hardcore.rng import stream
from hardcore.sampler import Lattice, accept_probability

try:
    from hardcore import _kernels
except ImportError:
    _kernels = None


def bench(run, lat, sites, u, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        top, bottom = lat.top(), lat.bottom()
        t = time.perf_counter()
        run(top, bottom, lat.nbr, sites, u, p)
        best = min(best, time.perf_counter() - t)
    return best, top


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--lam", default="1")
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    lat = Lattice.build(Box(2, args.n), "odd")
    steps = args.sweeps * lat.sweep
    gen = stream(0, 0, 0)
    sites = lat.sites[gen.integers(0, lat.sweep, size=steps, dtype=np.int32)]
    u = gen.random(steps)
    p = accept_probability(args.lam)

    t_py, s_py = bench(_pykernels.run_coupled, lat, sites, u, p, args.repeat)
    print(f"python  {steps:>10d} coupled updates  {t_py:8.3f} s  {steps / t_py / 1e6:8.2f} M/s")
    if _kernels is None:
        print("cython  extension not built")
        return
    t_cy, s_cy = bench(_kernels.run_coupled, lat, sites, u, p, args.repeat)
    print(f"cython  {steps:>10d} coupled updates  {t_cy:8.3f} s  {steps / t_cy / 1e6:8.2f} M/s")
    print(f"speedup {t_py / t_cy:.1f}x, identical final states: {np.array_equal(s_py, s_cy)}")


if __name__ == "__main__":
    main()
