"""Time one relaxation sweep per backend, strategy and mesh size.

    python3 benchmarks/bench_kernels.py [--N 32,64,128] [--repeat 5]

Reports the best wall time per sweep and the cost per interior node. The
state is taken a few sweeps into a three_sector solve so both backends see
the same mix of active and clamped nodes.
"""

import argparse
import time

import numpy as np

from segfd import _kernels
from segfd.benchmarks import get_benchmark
from segfd.grid import make_grid
from segfd.solver import Strategy, coefficients, init_state, sweep


def time_sweep(kern, strategy, values, co, repeat):
    best = float("inf")
    for _ in range(repeat):
        u = values.copy()
        out = u.copy()
        t0 = time.perf_counter()
        if strategy is Strategy.JACOBI:
            kern(u, out, co.c, co.den, co.q)
        else:
            kern(u, co.c, co.den, co.q)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", default="32,64,128")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    p = get_benchmark("three_sector")
    print(f"{'N':>5} {'strategy':>13} " + " ".join(f"{b + ' ms':>11} {'ns/node':>8}" for b in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for N in (int(t) for t in args.N.split(",")):
        g = make_grid(1.0, N)
        state = init_state(p, g)
        for _ in range(10):
            sweep(state, p, Strategy.RED_BLACK)
        co = coefficients(p, g)
        nodes = p.m * (N - 1) ** 2
        for strategy in Strategy:
            times = []
            for b in backends:
                kern = _kernels.kernels(b)[strategy.value]
                time_sweep(kern, strategy, state.values, co, 1)  # compile / warm up
                times.append(time_sweep(kern, strategy, state.values, co, args.repeat))
            cols = " ".join(f"{t * 1e3:11.3f} {t / nodes * 1e9:8.1f}" for t in times)
            extra = f"  {times[0] / times[1]:7.1f}x" if len(times) == 2 else ""
            print(f"{N:5d} {strategy.value:>13} {cols}{extra}")
    return 0


if __name__ == "__main__":
    np.seterr(all="ignore")
    raise SystemExit(main())
