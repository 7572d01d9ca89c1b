import math

import numpy as np
import pytest

from cltorus.expsum import EXP_DIFF_SWITCH, ExpPolySum, exp_diff_ratio
from oracles import quad_convolution


def test_canonicalisation():
    s = ExpPolySum([(1.0, 0, -2.0), (0.5, 0, -2.0), (-1.5, 0, -2.0), (2.0, 1, 0.0)])
    assert s.terms == ((2.0, 1, 0.0),)
    assert ExpPolySum([(1.0, 0, -1.0), (-1.0, 0, -1.0)]).terms == ()


def test_evaluation_scalar_and_vector():
    s = ExpPolySum([(2.0, 0, -1.0), (1.0 + 1.0j, 2, -0.5)])
    t = 1.3
    expected = 2.0 * math.exp(-t) + (1 + 1j) * t**2 * math.exp(-0.5 * t)
    assert s(t) == pytest.approx(expected, abs=1e-14)
    arr = s(np.array([0.0, t]))
    assert arr[0] == pytest.approx(2.0, abs=1e-14)
    assert arr[1] == pytest.approx(expected, abs=1e-14)


def test_add_scale_conj():
    a = ExpPolySum([(1.0 + 2.0j, 0, -1.0)])
    b = ExpPolySum([(0.5, 1, -1.0)])
    c = (a + b).scale(2.0)
    assert c(0.7) == pytest.approx(2.0 * (a(0.7) + b(0.7)), abs=1e-14)
    assert a.conjugate()(0.7) == pytest.approx(a(0.7).conjugate(), abs=1e-15)


@pytest.mark.parametrize("a", [-3.0, -0.5, 0.0])
def test_convolution_against_quadrature(a):
    s = ExpPolySum([(1.2, 0, -2.0), (0.3 - 0.7j, 1, -0.5), (-0.25, 3, 0.0)])
    conv = s.convolve_exp(a, weight=1.7)
    for t in (0.0, 0.4, 1.0, 3.0):
        oracle = quad_convolution(s, a, t, weight=1.7)
        assert conv(t) == pytest.approx(oracle, abs=1e-9)


def test_convolution_equal_rates_power_bump():
    s = ExpPolySum([(2.0, 1, -1.5)])
    conv = s.convolve_exp(-1.5)
    assert conv.terms == ((1.0, 2, -1.5),)
    for t in (0.5, 2.0):
        assert conv(t) == pytest.approx(quad_convolution(s, -1.5, t), abs=1e-10)


def test_convolution_snaps_float_noise_rates():
    b = -1.5 + 1e-15
    conv = ExpPolySum([(1.0, 0, b)]).convolve_exp(-1.5)
    assert len(conv.terms) == 1 and conv.terms[0][1] == 1


def test_exp_diff_ratio_convention_and_branches():
    # equal rates: t e^{alpha t}
    assert exp_diff_ratio(-2.0, -2.0, 1.3) == pytest.approx(1.3 * math.exp(-2.6), abs=1e-15)
    assert exp_diff_ratio(-2.0, -1.0, 0.0) == 0.0
    # both branches agree to 1e-12 at the switchover
    for sign in (+1.0, -1.0):
        alpha = -1.0
        t = 2.0
        for scale in (0.5, 1.0, 2.0):
            beta = alpha + sign * scale * EXP_DIFF_SWITCH / t
            direct = (math.exp(alpha * t) - math.exp(beta * t)) / (alpha - beta)
            stable = exp_diff_ratio(alpha, beta, t)
            assert stable == pytest.approx(direct, rel=1e-12)
    # generic values against the plain formula
    assert exp_diff_ratio(-3.0, -1.0, 0.8) == pytest.approx(
        (math.exp(-2.4) - math.exp(-0.8)) / (-2.0), rel=1e-14)
