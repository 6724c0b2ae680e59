"""Compare the compiled and numpy pulse kernels, and Monte Carlo thread scaling.

    python benchmarks/bench_kernels.py [--rows 500] [--atoms 16] [--n-pairs 16] [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from srmetro import NoiseParams, ProtocolConfig, mc_fringe
from srmetro.analysis import default_r0_grid
from srmetro.kernels import BACKEND, apply_sequence, available_backends


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernel(rows, atoms, n_pairs, repeat):
    rng = np.random.default_rng(0)
    pulses = 2 * n_pairs + 1
    x = rng.uniform(0, 100, (rows, atoms))
    areas = rng.normal(math.pi, 0.1, (rows, pulses))
    phases = rng.normal(0, 0.01, (rows, pulses))
    ks = np.where(np.arange(pulses) % 2, -2 * math.pi, 2 * math.pi)
    amp0 = np.full((rows, atoms), 1 / math.sqrt(atoms), dtype=np.complex128)

    results = {}
    for name in available_backends():
        def run():
            b = amp0.copy()
            a = np.zeros_like(b)
            apply_sequence(b, a, x, areas, ks, phases, backend=name)
            return b, a

        results[name] = (_best(run, repeat), run())
    updates = rows * atoms * pulses
    print(f"kernel: rows={rows} atoms={atoms} pulses={pulses} ({updates / 1e6:.1f} M atom-pulse updates)")
    for name, (t, _) in results.items():
        print(f"  {name:<8s} {t * 1e3:9.2f} ms  {updates / t / 1e6:8.1f} M updates/s")
    if len(results) == 2:
        (tc, (bc, ac)), (tp, (bp, ap)) = results["cython"], results["python"]
        dev = max(np.max(np.abs(bc - bp)), np.max(np.abs(ac - ap)))
        print(f"  speedup cython/python: {tp / tc:.1f}x   max |difference| {dev:.1e}")


def bench_threads(trials, n_pairs, repeat):
    cfg = ProtocolConfig(n_pairs=n_pairs, k1=2 * math.pi, n_atoms=16, noise=NoiseParams(0.1, 0.01))
    grid = default_r0_grid(n_pairs, 2 * math.pi, points_per_period=20)
    print(f"mc_fringe: N={n_pairs} points={grid.size} trials={trials} backend={BACKEND}")
    base = None
    for threads in (1, 2, 4):
        t = _best(lambda: mc_fringe(cfg, grid, trials, threads=threads), repeat)
        base = base or t
        print(f"  threads={threads}  {t:7.3f} s  ({base / t:.2f}x)")


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--rows", type=int, default=500)
    p.add_argument("--atoms", type=int, default=16)
    p.add_argument("--n-pairs", type=int, default=16)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    bench_kernel(args.rows, args.atoms, args.n_pairs, args.repeat)
    bench_threads(args.trials, args.n_pairs, max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
