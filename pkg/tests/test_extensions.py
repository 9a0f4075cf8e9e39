import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscext import extensions as E
from oscext.grid import BoundaryData

angles = st.floats(0.0, math.pi, exclude_max=True)
reals = st.floats(-3.0, 3.0)
params = st.floats(0.0, 2 * math.pi)


def test_btheta_pi_half_is_free():
    assert E.boundary_residual(E.BTheta(math.pi / 2), BoundaryData(1, 2, 1, 2)) < 1e-15


def test_btheta_simplified_form():
    th = 1.1
    f0, a = 0.7, -0.4
    jump = math.sqrt(2) * f0 / math.tan(th)  # f'(+0) - f'(-0) = sqrt(2) cot(theta) f(0)
    b = BoundaryData(f0, a, f0, a + jump)
    assert E.boundary_residual(E.BTheta(th), b) < 1e-15
    assert f0 == pytest.approx(math.tan(th) / math.sqrt(2) * (b.df_plus - b.df_minus).real)


def test_btheta_requires_continuity():
    assert E.boundary_residual(E.BTheta(math.pi / 2), BoundaryData(1, 2, 1.1, 2)) > 1e-2


def test_halfline_uses_one_side():
    ext = E.HalfLinePlus(0.0)
    assert E.boundary_residual(ext, BoundaryData(5, 5, 0, 3)) == 0.0
    assert E.boundary_residual(E.HalfLineMinus(math.pi / 2), BoundaryData(4, 0, 9, 9)) < 1e-15


def test_theta_validation():
    for bad in (-0.1, math.pi, 4.0):
        with pytest.raises(ValueError, match=r"\[0, pi\)"):
            E.BTheta(bad)
    with pytest.raises(ValueError):
        E.HalfLine("left", 0.1)


def test_classical_ck():
    ext = E.ck_from_special("classical")
    assert E.boundary_residual(ext, BoundaryData(1, 2, 1, 2)) < 1e-15
    assert E.boundary_residual(ext, BoundaryData(1, 2, 1, 2.5)) > 1e-2


def test_k_antidiag_minus_one_is_not_continuity():
    # phi = pi, alpha = beta = 0 couples f(-0) to -f'(+0) instead
    ext = E.CK(math.pi, 0.0)
    assert E.boundary_residual(ext, BoundaryData(1, 2, 1, 2)) > 0.1
    assert E.boundary_residual(ext, BoundaryData(1, 2, 2, -1)) < 1e-15


@given(st.floats(0.01, math.pi - 0.01).filter(lambda a: abs(a - math.pi / 2) > 1e-3), reals, reals)
def test_delta_conditions(alpha, f0, d):
    ext = E.ck_from_special("delta", alpha)
    b = BoundaryData(f0, d + 2 * math.tan(alpha) * f0, f0, d)
    assert E.boundary_residual(ext, b) < 1e-12
    # same set as the BTheta with cot(theta) = -sqrt(2) tan(alpha)
    assert E.boundary_residual(E.btheta_from_delta(alpha), b) < 1e-12


@given(st.floats(0.01, math.pi - 0.01).filter(lambda a: abs(a - math.pi / 2) > 1e-3), reals, reals)
def test_delta_prime_conditions(alpha, fm, d):
    ext = E.ck_from_special("delta_prime", alpha)
    b = BoundaryData(fm, d, fm - 2 * math.tan(alpha) * d, d)
    assert E.boundary_residual(ext, b) < 1e-12


def test_delta_half_pi_is_dirichlet_pair():
    ext = E.ck_from_special("delta", math.pi / 2)
    assert E.boundary_residual(ext, BoundaryData(0, 1.3, 0, -0.2)) < 1e-15
    assert E.boundary_residual(ext, BoundaryData(0.1, 1.3, 0, -0.2)) > 1e-2


def test_special_case_validation():
    with pytest.raises(ValueError):
        E.ck_from_special("delta", 0.0)
    with pytest.raises(ValueError):
        E.ck_from_special("nonsense", 0.3)


@settings(max_examples=100)
@given(params, params, params, params)
def test_k_unitary(phi, a, b1, b2):
    K = E.k_matrix(phi, a, b1, b2)
    assert np.linalg.norm(K.conj().T @ K - np.eye(2)) < 1e-12


@settings(max_examples=100)
@given(params, params, params, params)
def test_ck_neutral(phi, a, b1, b2):
    r = E.neutral_subspace_check(E.CK(phi, a, b1, b2))
    assert r.ok and r.dimension == 2


@settings(max_examples=100)
@given(angles)
def test_theta_families_neutral(th):
    for ext, dim in ((E.HalfLinePlus(th), 1), (E.HalfLineMinus(th), 1), (E.BTheta(th), 2)):
        r = E.neutral_subspace_check(ext)
        assert r.ok and r.dimension == dim


def test_nonunitary_k_fails():
    K = E.k_matrix(0.3, 0.4, 0.5, 0.6)
    K[0, 1] += 0.2
    r = E.neutral_subspace_check(K)
    assert not r.ok and r.offending_pair is not None


def test_forms():
    assert sorted(E.BTHETA_FORM.eigenvalues()) == pytest.approx([-math.sqrt(2), 0, math.sqrt(2)], abs=1e-15)
    assert [f.max_neutral_dimension() for f in (E.HALFLINE_FORM, E.BTHETA_FORM, E.CK_FORM)] == [1, 2, 2]
    for f in (E.HALFLINE_FORM, E.BTHETA_FORM, E.CK_FORM):
        assert np.allclose(f.gram, f.gram.conj().T)


def test_coupling_map():
    assert E.coupling_from_btheta(math.pi / 2) == pytest.approx(0.0, abs=1e-16)
    assert E.coupling_from_btheta(0.0) is E.DIRICHLET
    assert E.btheta_from_coupling(E.DIRICHLET).theta == 0.0
    assert E.btheta_from_coupling(-1e9).theta > math.pi - 1e-8
    assert E.btheta_from_coupling(E.coupling_from_btheta(2.0)).theta == pytest.approx(2.0, abs=1e-12)


@given(st.floats(-1e3, 1e3))
def test_coupling_round_trip(c):
    assert E.coupling_from_btheta(E.btheta_from_coupling(c).theta) == pytest.approx(c, rel=1e-9, abs=1e-12)


def test_symmetry_map():
    assert E.symmetry_map(math.pi / 2, "plus") == (math.pi / 2, "minus")
    assert E.symmetry_map(0.0, "plus") == (0.0, "minus")
    assert E.symmetry_map(0.4, "minus") == (math.pi - 0.4, "plus")


@given(reals, reals, angles)
def test_symmetry_map_maps_domains(f, d, th):
    # g(t) = f(-t): traces (f, d) at +0 become (f, -d) at -0
    b = BoundaryData(0, 0, f, d)
    refl = BoundaryData(f, -d, 0, 0)
    th2, side = E.symmetry_map(th, "plus")
    r1 = E.boundary_residual(E.HalfLine("plus", th), b)
    r2 = E.boundary_residual(E.HalfLine(side, th2), refl)
    assert r1 == pytest.approx(r2, abs=1e-12)


def test_text_round_trip():
    for ext in (E.HalfLinePlus(0.3), E.HalfLineMinus(2.0), E.BTheta(1.0), E.CK(0.1, 0.2, 0.3, 0.4)):
        assert E.from_text(E.to_text(ext)) == ext
    with pytest.raises(ValueError):
        E.from_text("theta=1")
    with pytest.raises(ValueError):
        E.from_params("ck", phi=1.0)
