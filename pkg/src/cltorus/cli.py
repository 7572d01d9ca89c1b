"""Command line interface.

Subcommands: kernel, simulate, marginals, hierarchy, hprofile, metrics,
experiment.  Outputs are CSV files (plus meta/manifest JSON and SVG for the
profile plot); see README for the column layouts.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections import defaultdict

import numpy as np

from . import marginals as marginals_mod
from . import metrics as metrics_mod
from .harness import ExperimentConfig, parse_initial_spec, run_experiment, _fmt, _write_csv
from .hierarchy import (BalancedLimit, ChaoticInitial, FiniteN, OrderedInitial,
                        StrongLimit, Unscaled, h_profile, solve_hierarchy)
from .kernels import GAUSSIAN, LAPLACE, UNIFORM, BaseDensity, NoiseKernel
from .marginals import CoeffTable
from .profiles import OrderProfile
from .simulate import InitialCondition, SimParams, run_ensemble
from .svgplot import line_plot


def _add_kernel_args(p: argparse.ArgumentParser):
    p.add_argument("--density", choices=[GAUSSIAN, LAPLACE, UNIFORM], default=GAUSSIAN)
    p.add_argument("--sigma", type=float, default=1.0, help="gaussian scale")
    p.add_argument("--b", type=float, default=1.0, help="laplace scale")
    p.add_argument("--a", type=float, default=1.0, help="uniform half-width")


def _base_density(args) -> BaseDensity:
    param = {GAUSSIAN: args.sigma, LAPLACE: args.b, UNIFORM: args.a}[args.density]
    return BaseDensity(args.density, param)


def _parse_times(spec: str) -> list[float]:
    return [float(tok) for tok in spec.split(",") if tok.strip()]


def _epsilon(args, n: int | None = None) -> float:
    if args.epsilon is not None:
        return args.epsilon
    if args.gamma is None:
        raise SystemExit("give --epsilon or --gamma")
    if n is None:
        raise SystemExit("--gamma needs a particle number")
    return float(n) ** (-args.gamma)


def cmd_kernel(args) -> int:
    kernel = NoiseKernel(_base_density(args), args.epsilon)
    rows = []
    for n in range(-args.nmax, args.nmax + 1):
        chk = kernel.coeff_bound_check(n, k=args.moment_k)
        rows.append([str(n), _fmt(kernel.fourier_coeff(n)), _fmt(chk.lhs),
                     _fmt(chk.rhs), str(int(chk.passed))])
    _emit(args.out, ["n", "g_hat", "bound_lhs", "bound_rhs", "pass"], rows)
    return 0


def _emit(out, header, rows):
    if out is None or out == "-":
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(row) + "\n")
    else:
        _write_csv(out, header, rows)


def cmd_simulate(args) -> int:
    eps = _epsilon(args, args.n)
    kernel = NoiseKernel(_base_density(args), eps)
    kind, profile = parse_initial_spec(args.initial)
    initial = (InitialCondition.iid(profile) if kind == "chaotic"
               else InitialCondition.ordered(profile))
    snaps = tuple(_parse_times(args.snapshots)) if args.snapshots else ()
    t_end = args.t_end if args.t_end is not None else (max(snaps) if snaps else 0.0)
    params = SimParams(n_particles=args.n, lam=args.lam, epsilon=eps, mode=args.mode,
                       seed=args.seed, t_end=t_end, snapshot_times=snaps or (t_end,))
    ensemble = run_ensemble(params, initial, kernel, args.runs, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    for si, t in enumerate(params.snapshot_times):
        rows = ([str(r), str(p), _fmt(ensemble[si, r, p])]
                for r in range(args.runs) for p in range(params.n_particles))
        _write_csv(os.path.join(args.out, f"snapshot_{si:03d}.csv"),
                   ["run", "particle", "theta"], rows)
    meta = {
        "n": args.n, "lambda": args.lam, "gamma": args.gamma, "epsilon": eps,
        "mode": args.mode, "t_end": params.t_end,
        "snapshots": list(params.snapshot_times), "runs": args.runs,
        "seed": args.seed, "density": args.density,
        "density_param": kernel.base.param, "initial": args.initial,
    }
    with open(os.path.join(args.out, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _load_snapshots(in_dir: str):
    with open(os.path.join(in_dir, "meta.json")) as fh:
        meta = json.load(fh)
    out = []
    for si, t in enumerate(meta["snapshots"]):
        path = os.path.join(in_dir, f"snapshot_{si:03d}.csv")
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        angles = np.empty((meta["runs"], meta["n"]))
        angles[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2]
        out.append((float(t), angles))
    return meta, out


def cmd_marginals(args) -> int:
    meta, snapshots = _load_snapshots(args.in_dir)
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=int(meta["seed"]), spawn_key=(987,))))
    header = [f"n{i + 1}" for i in range(args.k)] + ["re", "im", "stderr", "t"]
    rows = []
    for t, angles in snapshots:
        table = marginals_mod.estimate(angles, args.k, args.nmax, t=t,
                                       tuples_per_config=args.tuples_per_config, rng=rng)
        for tup in sorted(table.values):
            v = table.values[tup]
            rows.append([*map(str, tup), _fmt(v.real), _fmt(v.imag),
                         _fmt(table.stderr[tup]), _fmt(t)])
    _emit(args.out, header, rows)
    return 0


def _hierarchy_initial(spec: str):
    kind, profile = parse_initial_spec(spec)
    return ChaoticInitial(profile) if kind == "chaotic" else OrderedInitial(profile)


def cmd_hierarchy(args) -> int:
    initial = _hierarchy_initial(args.initial)
    if args.regime == "finite-n":
        if args.n is None:
            raise SystemExit("--regime finite-n needs --n")
        kernel = NoiseKernel(_base_density(args), _epsilon(args, args.n))
        regime = FiniteN(args.n, kernel, args.lam)
    elif args.regime == "strong-limit":
        regime = StrongLimit(args.lam)
    elif args.regime == "balanced-limit":
        regime = BalancedLimit(args.lam, args.m2)
    else:
        if args.epsilon is None:
            raise SystemExit("--regime unscaled needs --epsilon")
        kernel = NoiseKernel(_base_density(args), args.epsilon)
        regime = Unscaled(kernel, args.lam)
    solution = solve_hierarchy(regime, initial, k_max=args.kmax, n_max=args.nmax)
    header = ["k"] + [f"n{i + 1}" for i in range(args.kmax)] + ["t", "re", "im"]
    rows = []
    for k in range(1, args.kmax + 1):
        for t in _parse_times(args.times):
            table = solution.table(k, t)
            for tup in sorted(table.values):
                v = table.values[tup]
                pad = [""] * (args.kmax - k)
                rows.append([str(k), *map(str, tup), *pad, _fmt(t),
                             _fmt(v.real), _fmt(v.imag)])
    _emit(args.out, header, rows)
    return 0


def cmd_hprofile(args) -> int:
    theta = np.linspace(-math.pi, math.pi, args.grid, endpoint=False)
    values, _ = h_profile(args.m2, args.terms, theta)
    rows = ([_fmt(th), _fmt(v)] for th, v in zip(theta, values))
    _emit(args.out_csv, ["theta", "H"], rows)
    if args.out_svg:
        line_plot(args.out_svg, theta, [("", values)],
                  title=f"pair-correlation profile, m2={args.m2:g}, "
                        f"{args.terms} cosine terms",
                  xlabel="theta", ylabel="H")
    return 0


def _read_table_csv(path: str) -> dict[float, CoeffTable]:
    """Read a coefficient CSV (marginals layout) into tables grouped by t."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        k = sum(1 for h in header if h.startswith("n"))
        groups: dict[float, dict] = defaultdict(dict)
        ses: dict[float, dict] = defaultdict(dict)
        for line in fh:
            parts = line.strip().split(",")
            tup = tuple(int(p) for p in parts[:k])
            re_v, im_v = float(parts[k]), float(parts[k + 1])
            se = float(parts[k + 2]) if len(parts) > k + 3 else 0.0
            t = float(parts[-1])
            groups[t][tup] = complex(re_v, im_v)
            ses[t][tup] = se
    out = {}
    for t, values in groups.items():
        n_max = max(abs(n) for tup in values for n in tup)
        out[t] = CoeffTable(k=k, n_max=n_max, t=t, values=values, stderr=ses[t])
    return out


def cmd_metrics(args) -> int:
    tables2 = _read_table_csv(args.table2)
    tables1 = _read_table_csv(args.table1)
    profile = OrderProfile.preset(args.profile)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    gap_rows = []
    for t in sorted(tables2):
        report = metrics_mod.diagnostics(tables2[t], tables1[t], profile, args.m2)
        rows.append([_fmt(t), _fmt(report.order_residual), _fmt(report.chaos_residual),
                     _fmt(report.partial_order_residual)])
        for n, gap in enumerate(report.diag_gap, start=1):
            gap_rows.append([_fmt(t), str(n), _fmt(gap)])
    _write_csv(os.path.join(args.out, "metrics.csv"),
               ["t", "order_residual", "chaos_residual", "partial_order_residual"], rows)
    _write_csv(os.path.join(args.out, "diag_gap.csv"), ["t", "n", "diag_gap"], gap_rows)
    return 0


def cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    run_experiment(config, args.out, workers=args.workers)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cltorus")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="noise kernel coefficients and bound checks")
    _add_kernel_args(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--nmax", type=int, default=50)
    p.add_argument("--moment-k", type=int, default=3, choices=(3, 4))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("simulate", help="run ensembles of the jump process")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--mode", choices=("rescaled", "unscaled"), default="rescaled")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--snapshots", default="")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--initial", default="one-plus-cos")
    p.add_argument("--workers", type=int, default=1)
    _add_kernel_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("marginals", help="estimate marginal coefficients from a run directory")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--tuples-per-config", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_marginals)

    p = sub.add_parser("hierarchy", help="exact coefficient tables in a given regime")
    p.add_argument("--regime", choices=("finite-n", "strong-limit", "balanced-limit", "unscaled"),
                   required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--kmax", type=int, default=2)
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--initial", default="one-plus-cos")
    p.add_argument("--times", default="1.0")
    _add_kernel_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("hprofile", help="balanced-regime pair-correlation profile")
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--terms", type=int, default=500)
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(func=cmd_hprofile)

    p = sub.add_parser("metrics", help="order/chaos diagnostics of coefficient CSVs")
    p.add_argument("--table2", required=True, help="level-2 coefficient CSV")
    p.add_argument("--table1", required=True, help="level-1 coefficient CSV")
    p.add_argument("--profile", default="one-plus-cos")
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("experiment", help="run a JSON-configured sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
