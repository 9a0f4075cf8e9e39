import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from oscext import series as S
from oscext.errors import SeriesBudgetError


def test_coefficients_omega0():
    s = S.build_series(0.0, 4)
    assert s.coeffs[0] == 1.0 and s.coeffs[1] == 0.0
    assert s.coeffs[2] == pytest.approx(1 / 12, rel=1e-15)
    # a_8 = a_4 / (8 * 7)
    assert s.coeffs[3] == 0.0


def test_coefficients_omega1():
    s = S.build_series(1.0, 3)
    assert s.coeffs[1] == 1.0
    assert s.coeffs[2] == pytest.approx((2 * 1.0 + 1.0) / 12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        S.build_series(-0.1)
    with pytest.raises(ValueError):
        S.build_series(1.0, 2)
    with pytest.raises(ValueError):
        S.build_series(8.0, S.certification_index(8.0))


def test_certification_index():
    # smallest n >= 1 with (w^2 + n/2)/(2n+1) < 1
    for w in (0.0, 1.0, 3.0):
        n0 = S.certification_index(w)
        assert (w * w + n0 / 2) / (2 * n0 + 1) < 1
        if n0 > 1:
            assert (w * w + (n0 - 1) / 2) / (2 * n0 - 1) >= 1


def test_u_at_zero():
    s = S.build_series(1.3)
    assert S.eval_u(s, 0.0) == 1.0
    assert S.eval_u_prime(s, 0.0) == 0.0


@pytest.mark.parametrize("t", [0.5, 1.0, 1.5])
def test_u0_cosh_sandwich(t):
    u = S.eval_u(S.build_series(0.0), t)
    assert math.cosh(t * t / 3) < u < math.cosh(t * t / 2)


def test_u_prime_small_t_and_fd():
    s = S.build_series(1.0)
    t = 1e-3
    assert S.eval_u_prime(s, t) == pytest.approx(2 * t, rel=1e-5)
    h = 1e-5
    for x in (0.3, 1.1, 2.4):
        fd = (S.eval_u(s, x + h) - S.eval_u(s, x - h)) / (2 * h)
        assert S.eval_u_prime(s, x) == pytest.approx(fd, rel=1e-8)


def test_u_monotone_in_t_and_omega():
    t = np.linspace(0, 4, 41)
    prev = None
    for w in (0.0, 0.5, 1.0, 2.0):
        u = S.eval_u(S.build_series(w), t)
        assert np.all(np.diff(u) > 0)
        if prev is not None:
            assert np.all(u[1:] > prev[1:])
        prev = u


def test_budget_error():
    s = S.build_series(0.0, 20)
    with pytest.raises(SeriesBudgetError):
        S.eval_u(s, 6.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 8.0), st.floats(0.0, 5.0))
def test_u_below_q_exp(w, t):
    s = S.build_series(w)
    assert math.log(S.eval_u(s, t)) <= s.log_q + t * t + 1e-12


@pytest.mark.parametrize("w", [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 64.0])
def test_G_against_closed_form(w):
    assert S.eval_G(w) == pytest.approx(oracles.G(w), rel=1e-10)


def test_G_decreasing_and_small():
    g = [S.eval_G(w) for w in (0, 0.5, 1, 2, 4)]
    assert all(a > b for a, b in zip(g, g[1:]))
    assert S.eval_G(8.0) < S.eval_G(0.0) / 10
    # regression value of the ratio
    assert S.eval_G(8.0) / S.eval_G(0.0) == pytest.approx(0.0597477, rel=1e-5)


def test_G0_between_cosh_integrals():
    lo = integrate.quad(lambda s: math.cosh(s * s / 2) ** -2, 0, 12, epsabs=1e-14)[0]
    hi = integrate.quad(lambda s: math.cosh(s * s / 3) ** -2, 0, 12, epsabs=1e-14)[0]
    assert lo < S.eval_G(0.0) < hi


def test_v_at_zero_and_slope():
    for w in (0.0, 1.0):
        s = S.build_series(w)
        assert S.eval_v(s, 0.0) == pytest.approx(S.eval_G(w), rel=1e-12)
        assert S.eval_v_prime(s, 0.0) == pytest.approx(-1.0, abs=1e-12)
        h = 1e-5
        assert (S.eval_v(s, h) - S.eval_v(s, 0.0)) / h == pytest.approx(-1.0, abs=1e-4)


def test_v_ode_residual():
    s = S.build_series(1.0)
    h = 1e-2
    for t in (0.3, 1.0, 2.0):
        v = [S.eval_v(s, t + k * h) for k in (-1, 0, 1)]
        d2 = (v[0] - 2 * v[1] + v[2]) / h**2
        assert abs(-0.5 * d2 + 0.5 * t * t * v[1] + v[1]) < 1e-4


def test_vtable_matches_eval_v():
    for w in (0.0, 2.0):
        tab = S.VTable(w)
        s = S.build_series(w)
        t = np.array([0.0, 0.5, 2.0, 4.0, 7.0])
        v, dv = tab(t)
        ref = np.array([S.eval_v(s, x) for x in t])
        dref = np.array([S.eval_v_prime(s, x) for x in t])
        np.testing.assert_allclose(v, ref, rtol=1e-9)
        np.testing.assert_allclose(dv, dref, rtol=1e-8)


def test_alphas():
    aA, aB = S.alpha_A(), S.alpha_B()
    assert 0 < aB < aA < math.pi / 2
    assert math.tan(aA) == pytest.approx(S.eval_G(0.0), rel=1e-10)
    assert math.tan(aB) == pytest.approx(S.eval_G(0.0) / math.sqrt(2), rel=1e-10)


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        S.QuadratureConfig(rel_tol=-1)
