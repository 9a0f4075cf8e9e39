import math
import warnings

import numpy as np
import pytest

from oscext import extensions as E
from oscext import spectrum as SP
from oscext.grid import from_evaluator
from oscext.series import alpha_A, alpha_B

import oracles


def test_secular_vanishes_at_hermite_levels():
    # theta = pi/2 is the free oscillator: every n + 1/2 is an eigenvalue
    ext = E.BTheta(math.pi / 2)
    for n in range(4):
        assert SP.secular(ext, n + 0.5).magnitude < 1e-9
    assert SP.secular(ext, 1.0).magnitude > 1e-3


def test_secular_factors_and_direction():
    s = SP.secular(E.BTheta(1.0), 0.3)
    y, dy = s.boundary_dir
    assert len(s.factors) == 2
    assert s.factors[0] == pytest.approx(y)
    assert s.factors[0] * s.factors[1] == pytest.approx(s.det_value.real, rel=1e-12)
    ya, dya = oracles.boundary_direction(0.3)
    assert dy / y == pytest.approx(dya / ya, rel=1e-9)


def test_classical_ck_levels():
    res = SP.eigenvalues_in(E.ck_from_special("classical"), 0.0, 6.0)
    assert [r.lam for r in res] == pytest.approx([n + 0.5 for n in range(6)], abs=1e-9)
    assert all(r.method == "secular_root" and r.multiplicity == 1 for r in res)


def test_halfline_levels():
    odd = SP.eigenvalues_in(E.HalfLinePlus(0.0), 0.0, 8.0)
    even = SP.eigenvalues_in(E.HalfLinePlus(math.pi / 2), 0.0, 8.0)
    assert [r.lam for r in odd] == pytest.approx([1.5, 3.5, 5.5, 7.5], abs=1e-9)
    assert [r.lam for r in even] == pytest.approx([0.5, 2.5, 4.5, 6.5], abs=1e-9)


@pytest.mark.parametrize("theta", [0.4, 1.3, 2.2, 2.9])
def test_btheta_even_channel_matches_oracle(theta):
    res = SP.eigenvalues_in(E.BTheta(theta), -10.0, 12.0)
    even = [r.lam for r in res if "even" in (r.channel or "")]
    odd = [r.lam for r in res if "odd" in (r.channel or "")]
    assert even == pytest.approx(oracles.btheta_even_eigenvalues(theta, -10.0, 12.0), abs=1e-8)
    assert odd == pytest.approx([1.5, 3.5, 5.5, 7.5, 9.5, 11.5], abs=1e-9)


def test_dirichlet_btheta_doubles_odd_levels():
    res = SP.eigenvalues_in(E.BTheta(0.0), 0.0, 4.0)
    assert [r.lam for r in res] == pytest.approx([1.5, 3.5], abs=1e-9)
    assert all(r.multiplicity == 2 and r.channel == "even+odd" for r in res)


def test_decoupled_ck_reports_sides():
    res = SP.eigenvalues_in(E.CK(math.pi / 2, math.pi / 2), 0.0, 4.0)
    assert res and all(r.channel in ("minus", "plus", "minus+plus") for r in res)


def test_max_count_and_order():
    res = SP.eigenvalues_in(E.BTheta(1.0), -5.0, 20.0, max_count=3)
    lams = [r.lam for r in res]
    assert len(lams) == 3 and lams == sorted(lams)


def test_close_roots_warn():
    # levels one apart are closer than twice a 0.6 step
    with pytest.warns(RuntimeWarning, match="closer than twice"):
        SP.eigenvalues_in(E.BTheta(math.pi / 2), 0.0, 2.0, step=0.6)


def test_no_warning_for_separated_roots():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SP.eigenvalues_in(E.BTheta(math.pi / 2), 0.0, 4.0)


def test_bad_window():
    with pytest.raises(ValueError):
        SP.eigenvalues_in(E.BTheta(1.0), 2.0, 1.0)


def test_negative_eigenvalue_regions():
    assert SP.negative_eigenvalue(math.pi / 2) is None
    thr = math.pi - alpha_B()
    at = SP.negative_eigenvalue(thr)
    assert at.method == "analytic_known" and at.lam == 0.0
    r = SP.negative_eigenvalue(3.0)
    assert r.method == "g_omega_inversion" and r.lam < 0
    w = math.sqrt(-r.lam)
    assert math.tan(3.0) == pytest.approx(-oracles.G(w) / math.sqrt(2), abs=1e-9)
    assert r.bracket[0] <= r.lam <= r.bracket[1]


def test_negative_eigenvalue_is_in_scan():
    r = SP.negative_eigenvalue(2.8)
    scan = SP.eigenvalues_in(E.BTheta(2.8), r.lam - 1.0, 0.0)
    assert [x.lam for x in scan] == pytest.approx([r.lam], abs=1e-8)


def test_negative_eigenvalue_monotone():
    thetas = np.linspace(math.pi - alpha_B() + 0.01, 3.1, 12)
    lams = [SP.negative_eigenvalue(t).lam for t in thetas]
    assert all(a > b for a, b in zip(lams, lams[1:]))


def test_halfline_negative_and_symmetry():
    assert SP.negative_eigenvalue_halfline(alpha_A(), "minus").lam == 0.0
    assert SP.negative_eigenvalue_halfline(0.0, "minus") is None
    assert SP.negative_eigenvalue_halfline(1.0, "plus") is None
    for th in (2.5, 3.0):
        plus = SP.negative_eigenvalue_halfline(th, "plus")
        image, side = E.symmetry_map(th, "plus")
        minus = SP.negative_eigenvalue_halfline(image, side)
        assert plus.lam == pytest.approx(minus.lam, abs=1e-12)
        assert math.tan(th) == pytest.approx(-oracles.G(math.sqrt(-plus.lam)), abs=1e-9)


@pytest.mark.parametrize("theta", [0.3, 1.5, 2.1, 2.6, 3.0])
def test_at_most_one_negative(theta):
    res = SP.eigenvalues_in(E.BTheta(theta), -40.0, 0.0)
    assert len(res) <= 1
    ref = SP.negative_eigenvalue(theta)
    assert len(res) == (0 if ref is None else 1)


def test_angle_inverses():
    lam = np.array([-2.0, 0.2, 1.1, 3.7])
    for th, l in zip(SP.btheta_angle(lam), lam):
        even = [r.lam for r in SP.eigenvalues_in(E.BTheta(th), l - 0.5, l + 0.5) if "even" in r.channel]
        assert l == pytest.approx(even[0], abs=1e-8)
    for th, l in zip(SP.halfline_angle(lam), lam):
        assert SP.secular(E.HalfLinePlus(th), l).magnitude < 1e-9


def _bump(t):
    # (t - 1)^4 (4 - t)^4 on [1, 4], zero elsewhere
    t = np.asarray(t, dtype=float)
    inside = (t > 1) & (t < 4)
    a, b = t - 1, 4 - t
    f = np.where(inside, a**4 * b**4, 0.0)
    df = np.where(inside, 4 * a**3 * b**4 - 4 * a**4 * b**3, 0.0)
    return f, df, np.zeros_like(t)


def test_form_positivity_scales():
    g = from_evaluator(_bump, np.linspace(-6, 6, 2400))
    q = SP.form_positivity(g)
    assert q > 0
    g2 = from_evaluator(lambda t: tuple(2 * x for x in _bump(t)), g.grid)
    assert SP.form_positivity(g2) == pytest.approx(4 * q, rel=1e-10)


def test_form_positivity_support():
    g = from_evaluator(lambda t: (np.exp(-t * t), -2 * t * np.exp(-t * t), 0 * t), np.linspace(-6, 6, 2400))
    with pytest.raises(ValueError, match="vanish"):
        SP.form_positivity(g)


def test_refined_roots_off_the_scan_grid():
    # with lo = 0.013 no n + 1/2 lands on a scan point, so every root goes through refinement
    res = SP.eigenvalues_in(E.BTheta(math.pi / 2), 0.013, 10.2)
    assert [r.lam for r in res] == pytest.approx([n + 0.5 for n in range(10)], abs=1e-9)
    assert all(0 < r.bracket[1] - r.bracket[0] <= 1e-9 for r in res)


def test_coupled_ck_can_have_two_negative_eigenvalues():
    # defect index 2 allows two levels below the restricted operator's bound; this K realizes it
    ext = E.CK(2.026937809323559, 3.931532584947185, 3.1856744090198275, 0.6560977855911249)
    res = SP.eigenvalues_in(ext, -50.0, 0.0)
    assert [r.lam for r in res] == pytest.approx([-17.716268186721848, -0.0399493992927577], abs=1e-8)
