import math

import numpy as np
import pytest

from cltorus import (BalancedLimit, ChaoticInitial, CoeffTable,
                     OrderProfile, StrongLimit, chaos_residual, diag_gap,
                     diagnostics, order_residual, partial_order_residual,
                     solve_hierarchy)
from cltorus.marginals import estimate, lattice_tuples
from cltorus.metrics import order_residual_report

ONE_COS = OrderProfile.one_plus_cos()
UNIFORM = OrderProfile.uniform()


def aligned_table(profile, k, n_max, t=0.0):
    values = {tup: complex(profile.coeff(sum(tup))) for tup in lattice_tuples(k, n_max)}
    return CoeffTable(k=k, n_max=n_max, t=t, values=values)


def tensor_table(profile, k, n_max, t=0.0):
    values = {tup: complex(np.prod([profile.coeff(n) for n in tup]))
              for tup in lattice_tuples(k, n_max)}
    return CoeffTable(k=k, n_max=n_max, t=t, values=values)


def level1_table(profile, n_max, t=0.0):
    return tensor_table(profile, 1, n_max, t)


def test_order_residual_aligned_is_zero():
    table = aligned_table(ONE_COS, 3, 2)
    assert order_residual(table, ONE_COS) <= 1e-12


def test_order_residual_independent_vs_aligned():
    # independence against alignment: at (1,-1) the gap is |0 - 1| = 1
    table = tensor_table(UNIFORM, 2, 2)
    assert order_residual(table, ONE_COS) == pytest.approx(1.0, abs=1e-12)


def test_order_residual_strong_limit_decay():
    lam = 1.0
    sol = solve_hierarchy(StrongLimit(lam), ChaoticInitial(ONE_COS), 3, 2)
    for t in (0.5, 1.0, 2.0):
        res = order_residual(sol.table(3, t), ONE_COS)
        from cltorus import order_decay_constant
        assert res <= order_decay_constant(3) * math.exp(-2 * lam * t) + 1e-12


def test_order_residual_coverage_restriction():
    prof = OrderProfile({1: 0.25}, exact_outside=False)
    table = aligned_table(ONE_COS, 2, 2)
    res, used, total = order_residual_report(table, prof)
    assert used < total
    assert res >= 0.0


def test_chaos_residual():
    assert chaos_residual(tensor_table(ONE_COS, 2, 2), level1_table(ONE_COS, 2)) <= 1e-12
    # aligned state is far from tensorised: |1 - 1/4| at (1,-1)
    res = chaos_residual(aligned_table(ONE_COS, 2, 2), level1_table(ONE_COS, 2))
    assert res >= 0.75 - 1e-12
    # balanced solutions are neither aligned nor tensorised at positive times
    sol = solve_hierarchy(BalancedLimit(1.0, 1.0), ChaoticInitial(ONE_COS), 2, 2)
    for t in (0.3, 1.0):
        t2 = sol.table(2, t)
        t1 = sol.table(1, t)
        assert chaos_residual(t2, t1) > 1e-3
        assert order_residual(t2, ONE_COS) > 1e-3
    with pytest.raises(ValueError):
        chaos_residual(level1_table(ONE_COS, 2), level1_table(ONE_COS, 2))


def test_diag_gap():
    assert diag_gap(aligned_table(ONE_COS, 2, 3)) == pytest.approx([0.0] * 3, abs=1e-12)
    gaps = diag_gap(tensor_table(UNIFORM, 2, 3))
    assert gaps == pytest.approx([1.0] * 3, abs=1e-12)
    # balanced limit at large times: gap(n) -> m2 n^2/(m2 n^2 + 2)
    sol = solve_hierarchy(BalancedLimit(1.0, 1.0), ChaoticInitial(ONE_COS), 2, 3)
    gaps = diag_gap(sol.table(2, 50.0))
    for n in (1, 2, 3):
        assert gaps[n - 1] == pytest.approx(n * n / (n * n + 2.0), abs=1e-10)
    assert gaps[0] == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_balanced_gap_lower_bound():
    # gap(n) >= m2 n^2/(m2 n^2+2) (1 - e^{-2 lam t}) for n != 0
    lam, m2 = 1.0, 1.0
    sol = solve_hierarchy(BalancedLimit(lam, m2), ChaoticInitial(ONE_COS), 2, 3)
    for t in (0.25, 0.5, 1.0, 2.0):
        gaps = diag_gap(sol.table(2, t))
        for n in (1, 2, 3):
            floor = (m2 * n * n / (m2 * n * n + 2.0)) * (1.0 - math.exp(-2 * lam * t))
            assert gaps[n - 1] >= floor - 1e-12


def test_partial_order_residual():
    # balanced limit at t=50: matches the limiting pair structure
    sol = solve_hierarchy(BalancedLimit(1.0, 1.0), ChaoticInitial(ONE_COS), 2, 3)
    assert partial_order_residual(sol.table(2, 50.0), 1.0) <= 1e-10
    # fully aligned table: the antidiagonal is 1, not 2/(m2 n^2+2)
    res = partial_order_residual(aligned_table(ONE_COS, 2, 3), 1.0)
    assert res == pytest.approx(max(1.0 - 2.0 / (n * n + 2.0) for n in (1, 2, 3))
                                + 0.5, abs=1e-12)   # off-diagonal max is coeff 1/2 at sum=+-1
    # uniform tensor table: residual = 2/(m2+2) at n = 1
    assert partial_order_residual(tensor_table(UNIFORM, 2, 2), 1.0) == pytest.approx(
        2.0 / 3.0, abs=1e-12)


def test_diagnostics_report_and_resolvable():
    rng = np.random.default_rng(0)
    ens = rng.uniform(-math.pi, math.pi, size=(500, 16))
    t2 = estimate(ens, 2, 2)
    t1 = estimate(ens, 1, 2)
    rep = diagnostics(t2, t1, ONE_COS, m2=1.0)
    assert rep.order_residual > 0.9          # uniform data vs aligned reference
    assert rep.resolvable(rep.order_residual)
    assert not rep.resolvable(0.0)
    assert rep.order_coverage[0] == rep.order_coverage[1]
    assert len(rep.diag_gap) == 2
