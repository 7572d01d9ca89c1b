"""Event-driven simulation of the choose-the-leader jump process on the torus.

N angles; at exponential event times a uniformly random ordered pair
(leader, follower) is drawn and the follower adopts the leader's angle plus a
small torus noise from the kernel.  The total event rate is configuration
independent -- lambda*N^2 in rescaled time, lambda*N unscaled -- so exact
(Gillespie-style) simulation has no discretisation error.  Snapshots report
the pre-event state at each requested time (left limit of the jump path).

Every run owns one counter-based Philox stream derived from
(seed, spawn_key=(run index,)), so ensemble members are independent and
reproducible regardless of scheduling, and trajectories do not depend on
which backend executes them (see ``backend``).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _pyloop, backend
from .kernels import FAMILY_CODES, NoiseKernel
from .profiles import OrderProfile

MODES = ("rescaled", "unscaled")


@dataclass
class SimParams:
    """Static description of one simulation: size, rates, horizon, snapshots.

    Either ``gamma`` (interaction scale eps = N^-gamma) or an explicit
    ``epsilon`` must be given.
    """

    n_particles: int
    lam: float = 1.0
    gamma: float | None = None
    epsilon: float | None = None
    mode: str = "rescaled"
    seed: int = 0
    t_end: float = 0.0
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("need at least two particles")
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.epsilon is None:
            if self.gamma is None:
                raise ValueError("give either gamma or epsilon")
            self.epsilon = float(self.n_particles) ** (-float(self.gamma))
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        snaps = tuple(float(s) for s in self.snapshot_times)
        if list(snaps) != sorted(snaps):
            raise ValueError("snapshot times must be sorted")
        if snaps and (snaps[0] < 0.0 or snaps[-1] > self.t_end):
            raise ValueError("snapshot times must lie in [0, t_end]")
        self.snapshot_times = snaps

    @property
    def rate(self) -> float:
        n = self.n_particles
        return self.lam * n * n if self.mode == "rescaled" else self.lam * n


@dataclass
class Configuration:
    """The N angles at one instant, wrapped to [-pi, pi)."""

    angles: np.ndarray
    clock: float = 0.0

    def copy(self) -> "Configuration":
        return Configuration(self.angles.copy(), self.clock)


@dataclass
class InitialCondition:
    kind: str                                   # "iid" | "ordered" | "point_mass"
    profile: OrderProfile | None = None
    theta0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("iid", "ordered", "point_mass"):
            raise ValueError(f"unknown initial condition kind {self.kind!r}")
        if self.kind in ("iid", "ordered") and self.profile is None:
            raise ValueError(f"{self.kind} initial condition needs a profile")

    @classmethod
    def iid(cls, profile: OrderProfile) -> "InitialCondition":
        return cls("iid", profile=profile)

    @classmethod
    def ordered(cls, profile: OrderProfile) -> "InitialCondition":
        return cls("ordered", profile=profile)

    @classmethod
    def point_mass(cls, theta0: float) -> "InitialCondition":
        return cls("point_mass", theta0=float(theta0))


def run_rng(seed: int, run_index: int = 0, spawn_prefix: tuple[int, ...] = ()) -> np.random.Generator:
    """The per-run stream: Philox keyed by (seed, spawn_prefix + (run_index,))."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(spawn_prefix) + (int(run_index),))
    return np.random.Generator(np.random.Philox(ss))


def init(params: SimParams, initial: InitialCondition, rng: np.random.Generator) -> Configuration:
    """Configuration at clock 0 distributed per the initial condition."""
    n = params.n_particles
    if initial.kind == "point_mass":
        angles = np.full(n, _pyloop.wrap_angle(initial.theta0))
    elif initial.kind == "ordered":
        theta = initial.profile.sample(rng, 1)[0]
        angles = np.full(n, theta)
    else:
        angles = initial.profile.sample(rng, n)
    return Configuration(angles=angles, clock=0.0)


def step(config: Configuration, params: SimParams, kernel: NoiseKernel,
         rng: np.random.Generator) -> Configuration:
    """Apply a single event: advance the clock and perform one collision."""
    angles = config.angles.copy()
    n = params.n_particles
    u = rng.random()
    dt = -math.log1p(-u) / params.rate
    i, j = _pyloop.draw_pair(rng, n)
    eps = params.epsilon
    x = _pyloop.sample_noise_line(rng, FAMILY_CODES[kernel.base.family],
                                  kernel.base.param, math.pi / eps)
    angles[j] = _pyloop.wrap_angle(angles[i] + eps * x)
    return Configuration(angles=angles, clock=config.clock + dt)


def _run_raw(params: SimParams, initial: InitialCondition, kernel: NoiseKernel,
             rng: np.random.Generator, loop) -> np.ndarray:
    config = init(params, initial, rng)
    snaps = np.asarray(params.snapshot_times, dtype=float)
    out = np.empty((snaps.size, params.n_particles))
    loop(rng, config.angles, out, snaps, params.rate, params.epsilon,
         FAMILY_CODES[kernel.base.family], kernel.base.param, params.t_end)
    return out


def run(params: SimParams, initial: InitialCondition, kernel: NoiseKernel,
        rng: np.random.Generator | None = None,
        backend_name: str | None = None) -> list[tuple[float, Configuration]]:
    """One trajectory; returns (snapshot time, configuration) pairs.

    Deterministic given (seed, params, initial): when ``rng`` is omitted it is
    derived from params.seed as run index 0.
    """
    if abs(kernel.epsilon - params.epsilon) > 1e-15 * max(1.0, params.epsilon):
        raise ValueError("kernel epsilon disagrees with simulation epsilon")
    if rng is None:
        rng = run_rng(params.seed, 0)
    loop = backend.event_loop(backend_name)
    out = _run_raw(params, initial, kernel, rng, loop)
    return [(t, Configuration(out[s].copy(), clock=t))
            for s, t in enumerate(params.snapshot_times)]


def run_ensemble(params: SimParams, initial: InitialCondition, kernel: NoiseKernel,
                 runs: int, spawn_prefix: tuple[int, ...] = (), workers: int = 1,
                 backend_name: str | None = None) -> np.ndarray:
    """Independent trajectories; returns angles of shape (snapshots, runs, N).

    Runs are independent streams spawned from params.seed; results land in
    run-index order whatever the scheduling, so aggregation is reproducible.
    """
    snaps = np.asarray(params.snapshot_times, dtype=float)
    loop = backend.event_loop(backend_name)
    out = np.empty((snaps.size, runs, params.n_particles))

    def one(r: int):
        rng = run_rng(params.seed, r, spawn_prefix)
        out[:, r, :] = _run_raw(params, initial, kernel, rng, loop)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(runs)))
    else:
        for r in range(runs):
            one(r)
    return out
