"""Empirical Fourier coefficients of k-particle marginals, with standard errors.

For an ensemble of configurations the coefficient at an index tuple
(n_1, ..., n_k) is the average of exp(-i sum_j n_j theta_{i_j}) over
distinct-index k-tuples of particles and over runs.  Averages over all ordered
pairs (k = 2, moderate N) are computed through power sums

    S(n) = sum_j exp(-i n theta_j),
    sum_{i != j} e^{-i(n1 th_i + n2 th_j)} = S(n1) S(n2) - S(n1+n2),

which is the exhaustive pair enumeration in O(N) per coefficient.  Larger k or
very large N fall back to a fixed number of random distinct tuples per
configuration, symmetrised over tuple order.  Standard errors are computed
across runs (within-run tuples share particles and are correlated), with the
across-run reduction done in fixed run order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# up to this N the k = 2 estimator enumerates every ordered pair
EXHAUSTIVE_PAIR_LIMIT = 512


def lattice_tuples(k: int, n_max: int):
    """All index tuples with |n_i| <= n_max, lexicographic order."""
    rng = range(-n_max, n_max + 1)
    return list(itertools.product(rng, repeat=k))


@dataclass
class CoeffTable:
    """Fourier coefficients of a k-th marginal on the lattice |n_i| <= n_max.

    ``stderr`` is None for analytic tables.  Invariants: unit mass at the zero
    tuple, conjugate symmetry under global sign flip, invariance under tuple
    permutation (marginals of exchangeable laws are symmetric).
    """

    k: int
    n_max: int
    t: float
    values: dict[tuple[int, ...], complex]
    stderr: dict[tuple[int, ...], float] | None = None
    runs: int | None = None

    def value(self, tup) -> complex:
        return self.values[tuple(int(n) for n in tup)]

    def se(self, tup) -> float | None:
        if self.stderr is None:
            return None
        return self.stderr[tuple(int(n) for n in tup)]

    def tuples(self):
        return list(self.values.keys())

    def max_se(self) -> float:
        if not self.stderr:
            return 0.0
        return max(self.stderr.values())

    def validate(self, atol: float = 1e-9):
        zero = (0,) * self.k
        if abs(self.values[zero] - 1.0) > atol:
            raise ValueError(f"mass violated: value{zero} = {self.values[zero]}")
        for tup, v in self.values.items():
            neg = tuple(-n for n in tup)
            if abs(v - self.values[neg].conjugate()) > atol:
                raise ValueError(f"conjugate symmetry violated at {tup}")
            srt = tuple(sorted(tup))
            if abs(v - self.values[srt]) > atol:
                raise ValueError(f"permutation symmetry violated at {tup}")
            if abs(v) > 1.0 + max(atol, 6.0 * (self.stderr or {}).get(tup, 0.0)):
                raise ValueError(f"|coefficient| > 1 at {tup}: {v}")
        return self


def per_run_coefficient(angles: np.ndarray, n_tuple) -> np.ndarray:
    """Per-run single-coefficient estimates; k = 1 uses all particles,
    k = 2 all ordered distinct pairs (via power sums)."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    n_tuple = tuple(int(n) for n in n_tuple)
    n = angles.shape[1]
    if len(n_tuple) == 1:
        return np.exp(-1j * n_tuple[0] * angles).mean(axis=1)
    if len(n_tuple) == 2:
        n1, n2 = n_tuple
        s1 = np.exp(-1j * n1 * angles).sum(axis=1)
        s2 = np.exp(-1j * n2 * angles).sum(axis=1)
        s12 = np.exp(-1j * (n1 + n2) * angles).sum(axis=1)
        return (s1 * s2 - s12) / (n * (n - 1))
    raise ValueError("per_run_coefficient supports k = 1 or 2")


def _power_sums(angles: np.ndarray, max_order: int) -> np.ndarray:
    """S[r, m] = sum_j exp(-i m theta_rj) for m = 0..max_order."""
    runs, n = angles.shape
    out = np.empty((runs, max_order + 1), dtype=complex)
    out[:, 0] = n
    for m in range(1, max_order + 1):
        out[:, m] = np.exp(-1j * m * angles).sum(axis=1)
    return out


def _sum_at(power_sums: np.ndarray, m: int) -> np.ndarray:
    if m >= 0:
        return power_sums[:, m]
    return power_sums[:, -m].conjugate()


def _per_run_exhaustive(angles, k, tuples):
    n = angles.shape[1]
    max_order = max(max(abs(t[0]), abs(t[1]), abs(t[0] + t[1])) for t in tuples) if k == 2 \
        else max(abs(t[0]) for t in tuples)
    ps = _power_sums(angles, max_order)
    cols = []
    if k == 1:
        for (n1,) in tuples:
            cols.append(_sum_at(ps, n1) / n)
    else:
        for n1, n2 in tuples:
            cols.append((_sum_at(ps, n1) * _sum_at(ps, n2) - _sum_at(ps, n1 + n2)) / (n * (n - 1)))
    return np.stack(cols, axis=1)


def _per_run_sampled(angles, k, tuples, tuples_per_config, rng):
    runs, n = angles.shape
    n_mat = np.array(tuples, dtype=float)           # (T_idx, k)
    perms = list(itertools.permutations(range(k)))
    v = np.empty((runs, len(tuples)), dtype=complex)
    for r in range(runs):
        picks = rng.permuted(np.tile(np.arange(n), (tuples_per_config, 1)), axis=1)[:, :k]
        theta = angles[r][picks]                    # (T, k)
        # symmetrise over tuple order so permutation symmetry holds exactly
        theta = np.concatenate([theta[:, p] for p in perms], axis=0)
        phases = theta @ n_mat.T                    # (T * k!, T_idx)
        v[r] = np.exp(-1j * phases).mean(axis=0)
    return v


def _table_from_per_run(per_run: np.ndarray, tuples, k, n_max, t) -> CoeffTable:
    runs = per_run.shape[0]
    means = per_run.mean(axis=0)
    if runs >= 2:
        var = per_run.real.var(axis=0, ddof=1) + per_run.imag.var(axis=0, ddof=1)
        ses = np.sqrt(var / runs)
        stderr = {tup: float(ses[i]) for i, tup in enumerate(tuples)}
    else:
        stderr = {tup: 0.0 for tup in tuples}
    values = {tup: complex(means[i]) for i, tup in enumerate(tuples)}
    return CoeffTable(k=k, n_max=n_max, t=t, values=values, stderr=stderr, runs=runs)


def estimate(angles: np.ndarray, k: int, n_max: int, t: float = 0.0,
             tuples_per_config: int = 64, rng: np.random.Generator | None = None) -> CoeffTable:
    """Estimate the k-th marginal coefficient table from an ensemble.

    ``angles`` has shape (runs, N), one configuration per run at a common
    time.  k = 1 always averages over all particles and k = 2 over all ordered
    distinct pairs up to N = 512; beyond that, ``tuples_per_config`` random
    distinct k-tuples are drawn per configuration (requires ``rng``).
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    runs, n = angles.shape
    if k > n:
        raise ValueError(f"marginal order k={k} exceeds particle count N={n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    tuples = lattice_tuples(k, n_max)
    if k == 1 or (k == 2 and n <= EXHAUSTIVE_PAIR_LIMIT):
        per_run = _per_run_exhaustive(angles, k, tuples)
    else:
        if tuples_per_config < 1:
            raise ValueError("tuples_per_config must be >= 1")
        if rng is None:
            raise ValueError("rng is required for the sampled-tuple estimator")
        per_run = _per_run_sampled(angles, k, tuples, tuples_per_config, rng)
    return _table_from_per_run(per_run, tuples, k, n_max, float(t))


def merge(tables: list[CoeffTable]) -> CoeffTable:
    """Pool estimates by run counts (exact law-of-total-variance pooling)."""
    if not tables:
        raise ValueError("nothing to merge")
    head = tables[0]
    for tb in tables[1:]:
        if (tb.k, tb.n_max, tb.t) != (head.k, head.n_max, head.t):
            raise ValueError("merge requires identical (k, n_max, t) metadata")
        if tb.runs is None or tb.stderr is None:
            raise ValueError("merge requires empirical tables with run counts")
    if head.runs is None or head.stderr is None:
        raise ValueError("merge requires empirical tables with run counts")
    total = sum(tb.runs for tb in tables)
    values: dict[tuple, complex] = {}
    stderr: dict[tuple, float] = {}
    for tup in head.values:
        mean = sum(tb.runs * tb.values[tup] for tb in tables) / total
        sse = 0.0
        for tb in tables:
            s2 = tb.runs * tb.stderr[tup] ** 2          # per-run variance
            sse += (tb.runs - 1) * s2 + tb.runs * abs(tb.values[tup] - mean) ** 2
        pooled = sse / (total - 1) if total > 1 else 0.0
        values[tup] = mean
        stderr[tup] = math.sqrt(pooled / total)
    return CoeffTable(k=head.k, n_max=head.n_max, t=head.t, values=values,
                      stderr=stderr, runs=total)
