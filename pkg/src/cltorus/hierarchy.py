"""Exact Fourier-space solver for the marginal hierarchy of the jump process.

The coefficient of the k-th marginal at an index tuple obeys a closed linear
recursion: a scalar decay plus a weighted sum over pair merges
(n_i, n_j) -> n_i + n_j of level k-1 coefficients.  Solving level by level
with ExpPolySum keeps everything exact in time.  Four parameterisations share
the same recursion and differ only in decay rates and pair weights:

    finite_n        rescaled dynamics at particle number N with kernel g_eps
    strong_limit    N -> infinity with N eps_N^2 -> 0 (alignment dominates)
    balanced_limit  N -> infinity with N eps_N^2 = 1 (diffusive balance)
    unscaled        N -> infinity without time rescaling (no pair term left)

Coefficients are permutation invariant (marginals of exchangeable laws), so
the memoisation key is the sorted tuple; the all-zero tuple is pinned to the
constant 1 (mass conservation, exact in the dynamics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expsum import ExpPolySum, exp_diff_ratio
from .kernels import NoiseKernel
from .marginals import CoeffTable, lattice_tuples
from .profiles import CoverageError, OrderProfile


class TupleUnavailableError(ValueError):
    """The recursion for a tuple needs initial data outside the provided coverage."""


# ---------------------------------------------------------------------------
# regimes

class FiniteN:
    """Rescaled dynamics at finite particle number."""

    label = "finite_n"

    def __init__(self, n_particles: int, kernel: NoiseKernel, lam: float = 1.0):
        if n_particles < 2:
            raise ValueError("need at least two particles")
        self.n_particles = int(n_particles)
        self.kernel = kernel
        self.lam = float(lam)
        self._c = self.lam * self.n_particles / (self.n_particles - 1.0)

    def decay_rate(self, k: int, tup) -> float:
        n = self.n_particles
        gap = sum(1.0 - self.kernel.fourier_coeff(m) for m in tup)
        return self._c * ((n - k) * gap + k * (k - 1))

    def pair_weight(self, ni: int, nj: int) -> float:
        return self._c * (self.kernel.fourier_coeff(ni) + self.kernel.fourier_coeff(nj))


class StrongLimit:
    """Limit with N eps_N^2 -> 0: the kernel coefficients flatten to 1."""

    label = "strong_limit"

    def __init__(self, lam: float = 1.0):
        self.lam = float(lam)

    def decay_rate(self, k: int, tup) -> float:
        return self.lam * k * (k - 1)

    def pair_weight(self, ni: int, nj: int) -> float:
        return 2.0 * self.lam


class BalancedLimit:
    """Limit with N eps_N^2 = 1: mode n keeps a diffusive decay m2 n^2 / 2."""

    label = "balanced_limit"

    def __init__(self, lam: float = 1.0, m2: float = 1.0):
        if m2 <= 0.0:
            raise ValueError("m2 must be positive")
        self.lam = float(lam)
        self.m2 = float(m2)

    def decay_rate(self, k: int, tup) -> float:
        return self.lam * (0.5 * self.m2 * sum(m * m for m in tup) + k * (k - 1))

    def pair_weight(self, ni: int, nj: int) -> float:
        return 2.0 * self.lam


class Unscaled:
    """Mean-field limit of the unscaled dynamics: modes decay independently."""

    label = "unscaled"

    def __init__(self, kernel: NoiseKernel, lam: float = 1.0):
        self.kernel = kernel
        self.lam = float(lam)

    def decay_rate(self, k: int, tup) -> float:
        return self.lam * sum(1.0 - self.kernel.fourier_coeff(m) for m in tup)

    def pair_weight(self, ni: int, nj: int) -> float:
        return 0.0


# ---------------------------------------------------------------------------
# initial data

class OrderedInitial:
    """Aligned start: f_k(0) coefficients depend on the index sum only."""

    kind = "ordered"

    def __init__(self, profile: OrderProfile):
        self.profile = profile

    def value(self, k: int, tup) -> complex:
        return self.profile.coeff(sum(tup))


class ChaoticInitial:
    """Independent start: tensor products of the single-particle profile."""

    kind = "chaotic"

    def __init__(self, profile: OrderProfile):
        self.profile = profile

    def value(self, k: int, tup) -> complex:
        out = 1.0 + 0.0j
        for n in tup:
            out *= self.profile.coeff(n)
        return out


class TableInitial:
    """Explicit initial coefficient tables, one per level.

    Validated on construction: each table's own invariants plus marginal
    consistency (appending a zero index reproduces the level below, within
    1e-9).
    """

    kind = "tables"

    def __init__(self, tables: dict[int, CoeffTable]):
        self.tables = dict(tables)
        for k, table in sorted(self.tables.items()):
            table.validate()
            below = self.tables.get(k - 1)
            if below is not None:
                for tup in below.values:
                    ext = tup + (0,)
                    if ext in table.values and abs(table.values[ext] - below.values[tup]) > 1e-9:
                        raise ValueError(
                            f"initial tables are marginally inconsistent at level {k}, {ext}")

    def value(self, k: int, tup) -> complex:
        table = self.tables.get(k)
        if table is None:
            raise CoverageError(f"no initial table for level {k}")
        v = table.values.get(tuple(tup))
        if v is None:
            raise CoverageError(f"initial table for level {k} does not cover {tup}")
        return v


# ---------------------------------------------------------------------------
# the solver

def _merged(tup, i, j):
    out = list(tup)
    out[i] = out[i] + out[j]
    del out[j]
    return tuple(sorted(out))


class HierarchySolution:
    """Lazily built exact solution; query by level, index tuple, and time."""

    def __init__(self, regime, initial, k_max: int, n_max: int):
        self.regime = regime
        self.initial = initial
        self.k_max = int(k_max)
        self.n_max = int(n_max)
        self._memo: dict[tuple[int, tuple], ExpPolySum] = {}

    def expsum(self, k: int, tup) -> ExpPolySum:
        """Exact time dependence of the coefficient at (k, tup)."""
        tup = tuple(int(n) for n in tup)
        if len(tup) != k:
            raise ValueError(f"tuple {tup} does not have length {k}")
        return self._solve(k, tuple(sorted(tup)))

    def _solve(self, k: int, canon: tuple) -> ExpPolySum:
        hit = self._memo.get((k, canon))
        if hit is not None:
            return hit
        if all(n == 0 for n in canon):
            # mass conservation: the zero tuple stays exactly 1
            sol = ExpPolySum.constant(1.0)
        else:
            rate = -self.regime.decay_rate(k, canon)
            try:
                base = self.initial.value(k, canon)
            except CoverageError as exc:
                raise TupleUnavailableError(
                    f"level {k} tuple {canon} unavailable: {exc}") from exc
            sol = ExpPolySum([(base, 0, rate)])
            for i in range(k - 1):
                for j in range(i + 1, k):
                    w = self.regime.pair_weight(canon[i], canon[j])
                    if w == 0.0:
                        continue
                    parent = self._solve(k - 1, _merged(canon, i, j))
                    sol = sol + parent.convolve_exp(rate, weight=w)
        self._memo[(k, canon)] = sol
        return sol

    def value(self, k: int, tup, t):
        return self.expsum(k, tup)(t)

    def available(self, k: int, tup) -> bool:
        try:
            self.expsum(k, tup)
            return True
        except TupleUnavailableError:
            return False

    def unavailable_tuples(self, k: int, n_max: int | None = None) -> list[tuple]:
        n_max = self.n_max if n_max is None else n_max
        return [tup for tup in lattice_tuples(k, n_max) if not self.available(k, tup)]

    def table(self, k: int, t: float, n_max: int | None = None,
              skip_unavailable: bool = False) -> CoeffTable:
        """Evaluate the level-k lattice at time t as a coefficient table."""
        if k > self.k_max:
            raise ValueError(f"level {k} beyond k_max={self.k_max}")
        n_max = self.n_max if n_max is None else n_max
        values: dict[tuple, complex] = {}
        missing: list[tuple] = []
        for tup in lattice_tuples(k, n_max):
            try:
                values[tup] = self.expsum(k, tup)(float(t))
            except TupleUnavailableError:
                missing.append(tup)
        if missing and not skip_unavailable:
            raise TupleUnavailableError(
                f"{len(missing)} tuples unavailable at level {k} "
                f"(first: {missing[0]}); initial data coverage is insufficient")
        return CoeffTable(k=k, n_max=n_max, t=float(t), values=values)


def solve_hierarchy(regime, initial, k_max: int, n_max: int) -> HierarchySolution:
    """Exact hierarchy solution for levels 1..k_max on the lattice |n_i| <= n_max.

    Parent tuples produced by index merging are solved on demand (and
    memoised), so a tuple is unavailable only when the initial data cannot
    cover its recursion tree; such tuples are reported, never approximated.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return HierarchySolution(regime, initial, k_max, n_max)


# ---------------------------------------------------------------------------
# closed forms

def first_marginal(regime, initial_coeff: complex, n: int, t) -> complex:
    """exp(rate * t) * initial coefficient with the regime's level-1 rate."""
    rate = -regime.decay_rate(1, (int(n),))
    t = np.asarray(t, dtype=float)
    out = np.exp(rate * t) * complex(initial_coeff)
    return complex(out) if out.ndim == 0 else out


def second_marginal_finiteN(n_particles: int, kernel: NoiseKernel, lam: float,
                            f2_0: complex, f1_0: complex, n1: int, n2: int,
                            t: float) -> complex:
    """Closed form for the finite-N pair coefficient at (n1, n2).

    ``f2_0`` is the initial pair coefficient at (n1, n2) and ``f1_0`` the
    initial first-marginal coefficient at n1 + n2.  Evaluated through the
    stable two-exponential difference (relative error <= 1e-12 near the
    degenerate rate crossing).
    """
    n = n_particles
    c = lam * n / (n - 1.0)
    g1 = kernel.fourier_coeff(n1)
    g2 = kernel.fourier_coeff(n2)
    g12 = kernel.fourier_coeff(n1 + n2)
    a2 = c * ((n - 2) * ((1.0 - g1) + (1.0 - g2)) + 2.0)
    b = lam * n * (1.0 - g12)
    return (math.exp(-a2 * t) * complex(f2_0)
            + c * (g1 + g2) * exp_diff_ratio(-a2, -b, t) * complex(f1_0))


def balanced_f2(f2_0: complex, f1_0: complex, lam: float, m2: float,
                n1: int, n2: int, t: float) -> complex:
    """Closed form for the balanced-limit pair coefficient at (n1, n2).

    Rates lam*((m2/2)(n1^2+n2^2)+2) and lam*(m2/2)(n1+n2)^2 cross exactly when
    m2*n1*n2 = 2; the equal-rate convention then contributes t*exp instead.
    """
    if m2 <= 0.0:
        raise ValueError("m2 must be positive")
    d1 = lam * (0.5 * m2 * (n1 * n1 + n2 * n2) + 2.0)
    d2 = lam * (0.5 * m2 * (n1 + n2) ** 2)
    return (math.exp(-d1 * t) * complex(f2_0)
            + 2.0 * lam * exp_diff_ratio(-d1, -d2, t) * complex(f1_0))


def unscaled_meanfield(kernel: NoiseKernel, f_hat_0: complex, n: int, t: float,
                       lam: float = 1.0) -> complex:
    """Mean-field evolution of a single coefficient without time rescaling.

    The limit equation carries no explicit rate constant; lam defaults to 1
    and is exposed for callers who scale time themselves.
    """
    return math.exp(lam * (kernel.fourier_coeff(n) - 1.0) * t) * complex(f_hat_0)


def order_decay_constant(k: int) -> float:
    """Explicit constants c_k bounding the approach to the aligned state:
    c_2 = 2 and c_k = 2 + c_{k-1} k(k-1)/(k(k-1)-2)."""
    if k < 2:
        raise ValueError("constants are defined for k >= 2")
    c = 2.0
    for j in range(3, k + 1):
        m = j * (j - 1)
        c = 2.0 + c * m / (m - 2.0)
    return c


# ---------------------------------------------------------------------------
# strong-limit mixture structure

@dataclass
class StrongLimitMixture:
    """Decomposition of the strong-limit level-k density at time t:
    a surviving copy of the initial density plus equal-weight components
    concentrated on the pair diagonals theta_i = theta_j."""

    k: int
    lam: float
    t: float
    initial_weight: float
    pair_weights: dict[tuple[int, int], float]
    regular_part: np.ndarray | None = None

    @property
    def diagonal_weight(self) -> float:
        return sum(self.pair_weights.values())

    @property
    def total_mass(self) -> float:
        return self.initial_weight + self.diagonal_weight


def limit_density_k(solution: HierarchySolution, k: int, t: float,
                    check_points: np.ndarray | None = None) -> StrongLimitMixture:
    """Mixture decomposition of the strong-limit solution at level k.

    Weight exp(-lam k(k-1) t) survives on the initial density; the rest is
    spread equally over the k(k-1)/2 diagonal components accumulated by the
    time integral.  When the initial data is a chaotic (tensor) profile and
    check points are given, the regular part's density is evaluated there.
    """
    if not isinstance(solution.regime, StrongLimit):
        raise ValueError("mixture decomposition applies to the strong limit only")
    lam = solution.regime.lam
    m = k * (k - 1)
    w0 = math.exp(-lam * m * t)
    per_pair = 2.0 * (1.0 - w0) / m
    pairs = {(i, j): per_pair for i in range(k - 1) for j in range(i + 1, k)}
    regular = None
    if check_points is not None and isinstance(solution.initial, ChaoticInitial):
        pts = np.atleast_2d(np.asarray(check_points, dtype=float))
        dens = np.ones(pts.shape[0])
        for col in range(pts.shape[1]):
            dens *= solution.initial.profile.density(pts[:, col])
        regular = w0 * dens
    mix = StrongLimitMixture(k=k, lam=lam, t=float(t), initial_weight=w0,
                             pair_weights=pairs, regular_part=regular)
    # cross-check against the exact solution: mass is conserved
    mass = solution.value(k, (0,) * k, t)
    if abs(mass - mix.total_mass) > 1e-12:
        raise AssertionError("mixture mass disagrees with the exact solution")
    return mix


# ---------------------------------------------------------------------------
# balanced-regime pair correlation profile

def h_coeff(m2: float, n: int) -> float:
    """Pair-difference coefficient 2/(m2 n^2 + 2) of the limiting profile."""
    return 2.0 / (m2 * n * n + 2.0)


def h_profile(m2: float, n_terms: int, theta) -> tuple[np.ndarray, dict[int, float]]:
    """Partial sum 1 + 4 sum_{n<=n_terms} cos(n theta)/(m2 n^2 + 2) on a grid.

    Terms are O(n^-2) so the series converges absolutely; the tail after
    n_terms is bounded by 4/n_terms uniformly.  Also returns the coefficients
    at (n, -n) for n = 0..n_terms.
    """
    if n_terms < 1:
        raise ValueError("need at least one term")
    theta = np.asarray(theta, dtype=float)
    ns = np.arange(1, n_terms + 1)
    weights = 4.0 / (m2 * ns**2 + 2.0)
    vals = 1.0 + np.cos(np.outer(theta, ns)) @ weights
    return vals, {n: h_coeff(m2, n) for n in range(0, n_terms + 1)}


def h_peak(m2: float = 1.0) -> float:
    """Closed form of the full-series profile at theta = 0.

    Uses sum_{n>=1} 1/(n^2 + a^2) = pi*coth(pi*a)/(2a) - 1/(2a^2) with
    a = sqrt(2/m2).
    """
    a = math.sqrt(2.0 / m2)
    tail_sum = (math.pi / math.tanh(math.pi * a) / (2.0 * a) - 1.0 / (2.0 * a * a)) / m2
    return 1.0 + 4.0 * tail_sum
