import math

import numpy as np
import pytest
from scipy import special

import oracles
from oscext import extensions as E
from oscext import ode
from oscext.errors import IntegrationError
from oscext.series import eval_G


def test_lambda_minus_half_matches_phi_plus():
    y = ode.build_l2_solution(-0.5)
    assert y.dvalue0 / y.value0 == pytest.approx(-2 / math.sqrt(math.pi), rel=1e-9)


def test_lambda_half_is_psi0():
    y = ode.build_l2_solution(0.5)
    assert abs(y.dvalue0 / y.value0) < 1e-9


@pytest.mark.parametrize("w", [0.25, 0.5, 1.0, 2.0])
def test_matches_series(w):
    y = ode.build_l2_solution(-w * w, tol=1e-11)
    assert y.dvalue0 / y.value0 == pytest.approx(-1 / eval_G(w), rel=1e-9)


@pytest.mark.parametrize("lam", [-7.5, -1.2, 0.0, 0.9, 3.3, 6.1, 11.7])
def test_matches_closed_form(lam):
    y = ode.build_l2_solution(lam, tol=1e-11)
    ref = oracles.boundary_direction(lam)
    assert ode.projective_distance(y.direction, ref) < 1e-9


def test_batched_directions_match_single():
    lams = np.array([-3.0, 0.2, 4.4, 9.9])
    y, dy = ode.boundary_directions(lams, 1e-11)
    for lam, a, b in zip(lams, y, dy):
        s = ode.build_l2_solution(lam, tol=1e-11)
        assert ode.projective_distance((a, b), s.direction) < 1e-9


@pytest.mark.parametrize("lam", [-2.0, 0.0, 0.7, 3.3])
def test_projective_stability(lam):
    a = ode.build_l2_solution(lam, tol=1e-11)
    b = ode.build_l2_solution(lam, tol=1e-11, start_T=1.25 * a.start_T)
    assert ode.projective_distance(a.direction, b.direction) < 1e-8


def test_verify_flag_and_turning_point():
    ode.build_l2_solution(2.0, verify=True)
    with pytest.raises(IntegrationError):
        ode.build_l2_solution(8.0, start_T=2.0)
    with pytest.raises(ValueError):
        ode.build_l2_solution(1.0, side="left")


def test_minus_side_is_reflection():
    p = ode.build_l2_solution(1.3, "plus")
    m = ode.build_l2_solution(1.3, "minus")
    assert m.value0 == p.value0 and m.dvalue0 == -p.dvalue0


def test_samples_sup_normalized_and_decaying():
    grid = np.linspace(0.05, 8, 200)
    y = ode.build_l2_solution(1.0, grid=grid)
    s = y.samples
    assert np.max(np.abs(s.values)) <= 1.0 + 1e-12
    half = np.argmin(np.abs(s.grid - y.start_T / 2))
    assert abs(s.values[-1]) <= abs(s.values[half])
    # pointwise against D_{lam - 1/2}(sqrt(2) t), the decaying parabolic-cylinder function
    ref = special.pbdv(0.5, math.sqrt(2) * s.grid)[0]
    c = ref[0] / s.values[0]
    np.testing.assert_allclose(c * s.values, ref, rtol=0, atol=1e-9 * np.max(np.abs(ref)))


def test_mirror_extend():
    y = ode.build_l2_solution(0.8)
    m = ode.mirror_extend(y)
    b = m.boundary
    assert b.f_plus == b.f_minus
    assert b.derivative_jump.real == pytest.approx(2 * y.dvalue0)
    np.testing.assert_array_equal(m.grid, -m.grid[::-1])
    np.testing.assert_array_equal(m.values, m.values[::-1])
    np.testing.assert_array_equal(m.d_values, -m.d_values[::-1])


def test_mirror_of_psi1_is_not_in_free_domain():
    y = ode.build_l2_solution(1.5)
    m = ode.mirror_extend(y)
    assert E.boundary_residual(E.BTheta(math.pi / 2), m.boundary) > 1e-2
    with pytest.raises(ValueError):
        ode.mirror_extend(ode.build_l2_solution(1.5, "minus"))
