"""Benchmark the compiled event loop against the pure-Python fallback.

Both backends consume the same random stream, so besides timing we assert the
trajectories are identical.  Run as a script:

    python benchmarks/benchmark_backends.py --n 128 --t-end 0.5 --runs 200
"""

import argparse
import time

import numpy as np

from cltorus import (InitialCondition, NoiseKernel, OrderProfile, SimParams,
                     backend, gaussian)
from cltorus.kernels import FAMILY_CODES
from cltorus.simulate import init, run_rng


def run_benchmark(n_particles=128, t_end=0.5, runs=200, lam=1.0, seed=0):
    eps = float(n_particles) ** -0.5
    params = SimParams(n_particles=n_particles, lam=lam, epsilon=eps, seed=seed,
                       t_end=t_end, snapshot_times=(t_end,))
    kernel = NoiseKernel(gaussian(1.0), eps)
    ic = InitialCondition.iid(OrderProfile.one_plus_cos())
    family = FAMILY_CODES[kernel.base.family]
    snaps = np.asarray(params.snapshot_times)
    rows = []
    results = {}
    for name in backend.available_backends():
        loop = backend.event_loop(name)
        out = np.empty((runs, 1, n_particles))
        events = 0
        start = time.perf_counter()
        for r in range(runs):
            rng = run_rng(seed, r)
            cfg = init(params, ic, rng)
            snap = np.empty((1, n_particles))
            events += loop(rng, cfg.angles, snap, snaps, params.rate, eps,
                           family, kernel.base.param, t_end)
            out[r] = snap
        elapsed = time.perf_counter() - start
        results[name] = out
        rows.append({
            "backend": name,
            "events": events,
            "seconds": elapsed,
            "events_per_s": events / elapsed,
        })
    reference = results[next(iter(results))]
    for row in rows:
        row["identical"] = bool(np.array_equal(results[row["backend"]], reference))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--t-end", type=float, default=0.5)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = run_benchmark(args.n, args.t_end, args.runs, seed=args.seed)
    print(f"{'backend':<8} {'events':>12} {'seconds':>10} {'events/s':>14} {'identical':>10}")
    for row in rows:
        print(f"{row['backend']:<8} {row['events']:>12d} {row['seconds']:>10.3f} "
              f"{row['events_per_s']:>14.3e} {str(row['identical']):>10}")
    if len(rows) == 2:
        fast = max(rows, key=lambda r: r["events_per_s"])
        slow = min(rows, key=lambda r: r["events_per_s"])
        print(f"speedup: {fast['events_per_s'] / slow['events_per_s']:.1f}x "
              f"({fast['backend']} over {slow['backend']})")


if __name__ == "__main__":
    main()
