import math

import numpy as np
import pytest

from cltorus import CoeffTable, estimate, merge
from cltorus.marginals import lattice_tuples, per_run_coefficient
from oracles import brute_force_coefficient


def random_ensemble(runs, n, seed=0):
    return np.random.default_rng(seed).uniform(-math.pi, math.pi, size=(runs, n))


def test_exhaustive_matches_brute_force_k1():
    ens = random_ensemble(3, 6, seed=1)
    table = estimate(ens, k=1, n_max=3)
    for tup in lattice_tuples(1, 3):
        oracle, _ = brute_force_coefficient(ens, tup)
        assert table.values[tup] == pytest.approx(oracle, abs=1e-12)


def test_exhaustive_matches_brute_force_k2():
    # the power-sum identity equals direct enumeration of all ordered pairs
    ens = random_ensemble(4, 7, seed=2)
    table = estimate(ens, k=2, n_max=2)
    for tup in lattice_tuples(2, 2):
        oracle, per_run = brute_force_coefficient(ens, tup)
        assert table.values[tup] == pytest.approx(oracle, abs=1e-12)
        se = math.sqrt(per_run.real.var(ddof=1) + per_run.imag.var(ddof=1)) / 2.0
        assert table.stderr[tup] == pytest.approx(se, abs=1e-12)


def test_mass_entry_exact():
    table = estimate(random_ensemble(5, 9, seed=3), k=2, n_max=2)
    assert table.values[(0, 0)] == 1.0
    assert table.stderr[(0, 0)] == 0.0
    table.validate()


def test_sampled_estimator_on_aligned_configs():
    # all angles equal per run: any distinct tuple gives exp(-i sum(n) theta)
    rng = np.random.default_rng(4)
    thetas = rng.uniform(-math.pi, math.pi, size=12)
    ens = np.tile(thetas[:, None], (1, 8))
    table = estimate(ens, k=3, n_max=1, tuples_per_config=5,
                     rng=np.random.default_rng(9))
    for tup in lattice_tuples(3, 1):
        target = np.exp(-1j * sum(tup) * thetas).mean()
        assert table.values[tup] == pytest.approx(target, abs=1e-12)
    table.validate()


def test_sampled_estimator_distribution():
    # iid uniform angles: coefficients vanish; sampled estimator within 4 SE
    ens = random_ensemble(400, 20, seed=5)
    table = estimate(ens, k=3, n_max=1, tuples_per_config=16,
                     rng=np.random.default_rng(10))
    for tup in [(1, 0, 0), (1, -1, 1), (1, 1, 1)]:
        assert abs(table.values[tup]) < 4 * max(table.stderr[tup], 1e-12)


def test_ordered_ensemble_k1_matches_profile():
    from cltorus import InitialCondition, OrderProfile, SimParams, init, run_rng
    prof = OrderProfile.one_plus_cos()
    p = SimParams(n_particles=32, epsilon=0.1, t_end=0.0)
    ens = np.stack([init(p, InitialCondition.ordered(prof), run_rng(77, r)).angles
                    for r in range(4000)])
    table = estimate(ens, k=1, n_max=2, t=0.0)
    for n in (1, 2):
        se = table.stderr[(n,)]
        assert abs(table.values[(n,)] - prof.coeff(n)) < 4 * se


def test_iid_uniform_pair_coefficient_small():
    ens = random_ensemble(2000, 16, seed=6)
    table = estimate(ens, k=2, n_max=1)
    se = table.stderr[(1, -1)]
    assert abs(table.values[(1, -1)]) < 4 * se


def test_k_exceeds_n():
    with pytest.raises(ValueError):
        estimate(random_ensemble(2, 3, seed=7), k=4, n_max=1,
                 rng=np.random.default_rng(0))


def test_merge_self_halves_and_weights():
    ens = random_ensemble(200, 8, seed=8)
    whole = estimate(ens, k=2, n_max=1)
    # disjoint halves pool back to the whole-ensemble estimate exactly
    half_a = estimate(ens[:100], k=2, n_max=1)
    half_b = estimate(ens[100:], k=2, n_max=1)
    pooled = merge([half_a, half_b])
    for tup in whole.values:
        assert pooled.values[tup] == pytest.approx(whole.values[tup], abs=1e-12)
        assert pooled.stderr[tup] == pytest.approx(whole.stderr[tup], abs=1e-12)
    assert pooled.runs == 200
    # merging a table with itself keeps values and shrinks SE by ~sqrt(2)
    double = merge([whole, whole])
    for tup in whole.values:
        assert double.values[tup] == pytest.approx(whole.values[tup], abs=1e-14)
        if whole.stderr[tup] > 0:
            assert double.stderr[tup] == pytest.approx(
                whole.stderr[tup] / math.sqrt(2.0), rel=5e-3)
    # unequal run counts weight 1:3
    a = estimate(random_ensemble(100, 8, seed=9), k=1, n_max=1)
    b = estimate(random_ensemble(300, 8, seed=10), k=1, n_max=1)
    m = merge([a, b])
    for tup in a.values:
        assert m.values[tup] == pytest.approx(
            0.25 * a.values[tup] + 0.75 * b.values[tup], abs=1e-14)
    # invariance to input order
    m2 = merge([b, a])
    for tup in a.values:
        assert m.values[tup] == pytest.approx(m2.values[tup], abs=1e-12)
        assert m.stderr[tup] == pytest.approx(m2.stderr[tup], abs=1e-12)


def test_merge_metadata_mismatch():
    a = estimate(random_ensemble(10, 8, seed=11), k=1, n_max=1, t=0.0)
    b = estimate(random_ensemble(10, 8, seed=12), k=1, n_max=1, t=1.0)
    with pytest.raises(ValueError):
        merge([a, b])


def test_per_run_coefficient_matches_table():
    ens = random_ensemble(6, 10, seed=13)
    vals = per_run_coefficient(ens, (1, -2))
    table = estimate(ens, k=2, n_max=2)
    assert vals.mean() == pytest.approx(table.values[(1, -2)], abs=1e-12)


def test_table_validate_catches_violations():
    values = {tup: 0.0 + 0.0j for tup in lattice_tuples(1, 1)}
    values[(0,)] = 1.0 + 0.0j
    CoeffTable(k=1, n_max=1, t=0.0, values=dict(values)).validate()
    bad = dict(values)
    bad[(1,)] = 0.5 + 0.1j   # breaks conjugate symmetry against (-1,)
    with pytest.raises(ValueError):
        CoeffTable(k=1, n_max=1, t=0.0, values=bad).validate()
    bad_mass = dict(values)
    bad_mass[(0,)] = 0.9 + 0.0j
    with pytest.raises(ValueError):
        CoeffTable(k=1, n_max=1, t=0.0, values=bad_mass).validate()
