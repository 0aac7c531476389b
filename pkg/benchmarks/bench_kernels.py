"""Time the compiled and NumPy grid kernels on the default oracle grid.

    python benchmarks/bench_kernels.py [--repeat 5] [--bandwidths 1,5,10,40]

Prints one line per bandwidth with the best-of-N time of each backend and
checks that both return the same optimum.
"""

import argparse
import time

import numpy as np

from edgecloud import OracleGrid, Scenario, g_eval, h_eval
from edgecloud import kernels
from edgecloud.oracle import grid_axes


def kernel_args(scenario, grid):
    betas, b_ups, ms, levels = grid_axes(scenario, grid)
    h_vals = np.array([h_eval(scenario.edge_model, m) for m in ms])
    g_vals = np.array([g_eval(scenario.cloud_model, b) for b in levels])
    s = scenario
    return (betas, b_ups, ms, h_vals, levels, g_vals,
            float(s.n_frames), float(s.feature_bits), float(s.pixels),
            float(s.se_up), float(s.se_down), float(s.bandwidth))


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        times.append(time.perf_counter() - start)
    return min(times), result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--bandwidths", default="1,2,5,10,20,40", help="MHz, comma-separated")
    parser.add_argument("--beta-steps", type=int, default=201)
    parser.add_argument("--b-up-steps", type=int, default=201)
    parser.add_argument("--m-steps", type=int, default=51)
    args = parser.parse_args(argv)

    grid = OracleGrid(args.beta_steps, args.b_up_steps, args.m_steps)
    base = Scenario()
    print(f"grid {grid.combinations(base):,} points; default backend: {kernels.BACKEND}")
    if kernels.enumerate_grid_compiled is None:
        print("compiled kernel not built; timing the NumPy kernel only")
    print(f"{'B (MHz)':>8} {'numpy (ms)':>11} {'cython (ms)':>12} {'speedup':>8}  same")
    for mhz in (float(v) for v in args.bandwidths.split(",")):
        kargs = kernel_args(base.replace(bandwidth=mhz * 1e6), grid)
        t_py, r_py = best_of(kernels.enumerate_grid_py, kargs, args.repeat)
        if kernels.enumerate_grid_compiled is None:
            print(f"{mhz:8g} {t_py * 1e3:11.2f}")
            continue
        t_c, r_c = best_of(kernels.enumerate_grid_compiled, kargs, args.repeat)
        print(f"{mhz:8g} {t_py * 1e3:11.2f} {t_c * 1e3:12.2f} {t_py / t_c:7.1f}x  {r_py == r_c}")


if __name__ == "__main__":
    main()
