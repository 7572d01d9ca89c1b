"""Order/chaos diagnostics of coefficient tables.

All residuals are sup norms over the truncated index lattice, matching the
coefficient-wise convergence statements they test.  A fully aligned (ordered)
state at level k has coefficients f_hat(sum n_j); an independent (chaotic)
state tensorises; and in the balanced regime the pair coefficients approach
2/(m2 n^2 + 2) on the antidiagonal and 0 off it.  For empirical tables each
residual carries a "resolvable" flag: below 4x the largest standard error a
residual is statistical noise, not signal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hierarchy import h_coeff
from .marginals import CoeffTable
from .profiles import OrderProfile


def order_residual(table: CoeffTable, profile: OrderProfile) -> float:
    """Sup distance from the aligned state generated by ``profile``.

    Tuples whose index sum the profile does not cover are skipped (the preset
    profiles cover everything); use ``order_residual_report`` for coverage.
    """
    return order_residual_report(table, profile)[0]


def order_residual_report(table: CoeffTable, profile: OrderProfile) -> tuple[float, int, int]:
    worst = 0.0
    used = 0
    total = 0
    for tup, v in table.values.items():
        total += 1
        s = sum(tup)
        if not profile.covers(s):
            continue
        used += 1
        worst = max(worst, abs(v - profile.coeff(s)))
    return worst, used, total


def chaos_residual(table2: CoeffTable, table1: CoeffTable) -> float:
    """Sup distance from the tensor product of the level-1 table."""
    if table2.k != 2 or table1.k != 1:
        raise ValueError("chaos residual compares a level-2 against a level-1 table")
    if table2.t != table1.t or table2.n_max > table1.n_max:
        raise ValueError("tables must share the time stamp and cover the same lattice")
    worst = 0.0
    for (n1, n2), v in table2.values.items():
        worst = max(worst, abs(v - table1.values[(n1,)] * table1.values[(n2,)]))
    return worst


def diag_gap(table2: CoeffTable) -> list[float]:
    """1 - Re F2(n, -n) for n = 1..n_max; vanishing gaps are necessary for order."""
    if table2.k != 2:
        raise ValueError("diagonal gap needs a level-2 table")
    return [1.0 - table2.values[(n, -n)].real for n in range(1, table2.n_max + 1)]


def partial_order_residual(table2: CoeffTable, m2: float) -> float:
    """Sup distance from the balanced-regime pair-correlation structure:
    2/(m2 n^2 + 2) on the antidiagonal, 0 elsewhere."""
    if table2.k != 2:
        raise ValueError("partial order residual needs a level-2 table")
    on_diag = 0.0
    off_diag = 0.0
    for (n1, n2), v in table2.values.items():
        if n1 + n2 == 0:
            on_diag = max(on_diag, abs(v - h_coeff(m2, n1)))
        else:
            off_diag = max(off_diag, abs(v))
    return on_diag + off_diag


@dataclass
class DiagnosticsReport:
    """Bundle of residuals for one (level-2, level-1) pair of tables."""

    k: int
    n_max: int
    t: float
    order_residual: float
    chaos_residual: float
    partial_order_residual: float
    diag_gap: list[float]
    order_coverage: tuple[int, int]
    max_se: float = 0.0

    def resolvable(self, residual: float) -> bool:
        """True when the residual exceeds 4x the largest standard error."""
        return residual >= 4.0 * self.max_se


def diagnostics(table2: CoeffTable, table1: CoeffTable, profile: OrderProfile,
                m2: float) -> DiagnosticsReport:
    res, used, total = order_residual_report(table2, profile)
    max_se = max(table2.max_se(), table1.max_se())
    return DiagnosticsReport(
        k=2,
        n_max=table2.n_max,
        t=table2.t,
        order_residual=res,
        chaos_residual=chaos_residual(table2, table1),
        partial_order_residual=partial_order_residual(table2, m2),
        diag_gap=diag_gap(table2),
        order_coverage=(used, total),
        max_se=max_se,
    )
