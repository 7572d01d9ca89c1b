"""Exact time dependence as finite sums of c * t^m * exp(r*t).

The Fourier-space marginal recursion only ever produces integrands of this
form, so the hierarchy can be solved exactly term by term: the convolution
integral of t^m e^{b t} against e^{a(t-s)} stays in the class, with the
degenerate case b = a bumping the polynomial power instead of dividing by
zero.  All rates arising from the dynamics are nonpositive.
"""

from __future__ import annotations

import math
import numpy as np

# rates closer than this (relative) are treated as equal when integrating;
# the induced error is O(|b-a| * t^(m+2)), far below the 1e-8 oracle tolerance
RATE_SNAP_TOL = 1e-12

# switch the two-exponential difference to its expm1 form below this |(b-a)t|
EXP_DIFF_SWITCH = 1e-4


def exp_diff_ratio(alpha: float, beta: float, t: float) -> float:
    """(e^{alpha t} - e^{beta t}) / (alpha - beta), equal to t e^{alpha t} at alpha = beta.

    Stable for nearly equal rates: for |(beta-alpha) t| below the switch the
    difference is evaluated as t e^{alpha t} expm1(d)/d, keeping relative error
    at the 1e-12 level through the crossover.
    """
    if alpha == beta:
        return t * math.exp(alpha * t)
    d = (beta - alpha) * t
    if d == 0.0:
        return t * math.exp(alpha * t)
    if abs(d) < EXP_DIFF_SWITCH:
        return t * math.exp(alpha * t) * (math.expm1(d) / d)
    return (math.exp(alpha * t) - math.exp(beta * t)) / (alpha - beta)


class ExpPolySum:
    """Canonical finite sum of terms coeff * t^power * exp(rate * t).

    Terms are merged on equal (power, rate) and exact-zero coefficients are
    dropped, so structurally cancelling contributions vanish identically.
    Instances are immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        merged: dict[tuple[int, float], complex] = {}
        for coeff, power, rate in terms:
            key = (int(power), float(rate))
            merged[key] = merged.get(key, 0.0 + 0.0j) + complex(coeff)
        self.terms = tuple(
            (c, p, r)
            for (p, r), c in sorted(merged.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            if c != 0.0
        )

    @classmethod
    def constant(cls, value) -> "ExpPolySum":
        return cls([(value, 0, 0.0)])

    @classmethod
    def zero(cls) -> "ExpPolySum":
        return cls()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, p, r in self.terms:
            out = out + c * t**p * np.exp(r * t)
        if out.ndim == 0:
            return complex(out)
        return out

    def __add__(self, other: "ExpPolySum") -> "ExpPolySum":
        return ExpPolySum(self.terms + other.terms)

    def scale(self, factor) -> "ExpPolySum":
        return ExpPolySum([(factor * c, p, r) for c, p, r in self.terms])

    def conjugate(self) -> "ExpPolySum":
        return ExpPolySum([(c.conjugate(), p, r) for c, p, r in self.terms])

    def max_abs_rate(self) -> float:
        return max((abs(r) for _, _, r in self.terms), default=0.0)

    def convolve_exp(self, a: float, weight=1.0) -> "ExpPolySum":
        """weight * integral_0^t e^{a (t-s)} self(s) ds, exactly.

        For a term c s^m e^{b s} the antiderivative of s^m e^{(b-a)s} gives
        polynomial terms at rate b plus a single constant term at rate a; when
        b = a (within RATE_SNAP_TOL relative) the power bumps to m+1 instead.
        """
        a = float(a)
        out = []
        for c, m, b in self.terms:
            c = weight * c
            if b == a or abs(b - a) <= RATE_SNAP_TOL * max(1.0, abs(a), abs(b)):
                out.append((c / (m + 1), m + 1, a))
                continue
            d = b - a
            fall = 1.0  # m! / (m-r)!
            for r in range(m + 1):
                out.append((c * (-1.0) ** r * fall / d ** (r + 1), m - r, b))
                fall *= m - r
            out.append((-c * (-1.0) ** m * math.factorial(m) / d ** (m + 1), 0, a))
        return ExpPolySum(out)

    def __repr__(self):
        if not self.terms:
            return "ExpPolySum(0)"
        bits = " + ".join(f"({c:.6g})*t^{p}*e^({r:.6g}t)" for c, p, r in self.terms)
        return f"ExpPolySum({bits})"
