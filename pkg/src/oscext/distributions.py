"""The functions w_1, w_2 and the point functionals delta, delta' on D(A).

Inner products use the unscaled expression ``L f = -f'' + t^2 f`` (twice the
oscillator), for which integration by parts against ``w_j`` gives exactly
``<L f, w_1> = 2 f(0)`` and ``<L f, w_2> = 2 G(0) f'(0)``.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .grid import GridFunction, default_grid, from_evaluator
from .hermite import psi
from .errors import QuadratureError
from .series import _GL_NODES, _GL_WEIGHTS, DEFAULT_QC, QuadratureConfig, VTable, _quad, eval_G

HALF_WIDTH = 12.0
SUITE_SEED = 20240613
N_RANDOM = 20

Evaluator = Callable[[np.ndarray], tuple]


def _both_sides(fun, qc: QuadratureConfig) -> float:
    """Adaptive integral over [-12, -0] plus [+0, 12]; ``fun`` takes a scalar."""
    return float(_quad(fun, -HALF_WIDTH, -0.0, qc, qc.abs_tol) + _quad(fun, 0.0, HALF_WIDTH, qc, qc.abs_tol))


@lru_cache(maxsize=4)
def _gl_rule(cells_per_unit: int):
    """Composite 12-point Gauss-Legendre nodes/weights on (0, 12], mirrored to [-12, -0)."""
    ncell = int(HALF_WIDTH * cells_per_unit)
    a = np.arange(ncell) / cells_per_unit
    half = 0.5 / cells_per_unit
    x = ((a + half)[:, None] + half * _GL_NODES).ravel()
    w = np.tile(half * _GL_WEIGHTS, ncell)
    return np.concatenate([-x[::-1], x]), np.concatenate([w[::-1], w])


def _integrate(fun, qc: QuadratureConfig, cells_per_unit: int = 8) -> float:
    """``int fun`` over both half-lines; ``fun`` is vectorized.

    The rule with cells of width 1/8 is checked against width 1/16; the
    difference is the error estimate.
    """
    x1, w1 = _gl_rule(cells_per_unit)
    x2, w2 = _gl_rule(2 * cells_per_unit)
    coarse, fine = float(fun(x1) @ w1), float(fun(x2) @ w2)
    err = abs(fine - coarse)
    if not np.isfinite(fine) or err > max(qc.abs_tol, qc.rel_tol * abs(fine)) * 10:
        raise QuadratureError(f"composite rule did not settle (difference {err:.3g})")
    return fine


def _L(ev: Evaluator):
    """``L f`` as a vectorized function."""

    def Lf(x):
        f, _, d2 = ev(x)
        return -d2 + x * x * f

    return Lf


def _value(ev: Evaluator):
    return lambda x: ev(x)[0]


_node_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _on_nodes(ev: Evaluator) -> Evaluator:
    """Memoize ``ev`` on the quadrature node arrays (keyed by their size)."""
    try:
        store = _node_cache.setdefault(ev, {})
    except TypeError:
        return ev

    def cached(x):
        if x.size not in store:
            store[x.size] = ev(x)
        return store[x.size]

    return cached


# --- w_1 and w_2 -------------------------------------------------------------------


@lru_cache(maxsize=1)
def _vtable() -> VTable:
    return VTable(0.0, t_max=HALF_WIDTH)


def _w_evaluator(index: int) -> Evaluator:
    odd = index == 2

    def ev(t):
        t = np.asarray(t, dtype=float)
        v, dv = _vtable()(np.abs(t))
        s = np.where(np.signbit(t), -1.0, 1.0)
        if odd:
            f, df = s * v, dv
        else:
            f, df = v, s * dv
        return f, df, t * t * f  # v'' = t^2 v for omega = 0

    return ev


def w_function(index: int, grid: Optional[np.ndarray] = None) -> GridFunction:
    """``w_1`` (even extension of ``v(., 0)``) or ``w_2`` (odd extension)."""
    if index not in (1, 2):
        raise ValueError("index must be 1 or 2")
    return from_evaluator(_w_evaluator(index), default_grid(HALF_WIDTH) if grid is None else grid)


@lru_cache(maxsize=None)
def w_norm(index: int, qc: QuadratureConfig = DEFAULT_QC) -> float:
    w = _value(_w_evaluator(index))
    return math.sqrt(_integrate(lambda x: w(x) ** 2, qc))


# --- test functions ----------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """An element of D(A) given analytically, with its graph norm.

    ``plus_norm`` is ``(||f||^2 + ||L f||^2)^(1/2)`` with ``L = -d^2 + t^2``.
    """

    __test__ = False  # not a pytest class

    name: str
    evaluator: Evaluator
    plus_norm: float

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))[0]

    @property
    def value0(self) -> float:
        return float(self.evaluator(np.array([0.0]))[0][0])

    @property
    def dvalue0(self) -> float:
        return float(self.evaluator(np.array([0.0]))[1][0])

    def grid_function(self, grid: Optional[np.ndarray] = None) -> GridFunction:
        return from_evaluator(self.evaluator, grid)


def make_test_function(name: str, evaluator: Evaluator, qc: QuadratureConfig = DEFAULT_QC) -> TestFunction:
    Lf, f = _L(evaluator), _value(evaluator)
    sq = _integrate(lambda x: f(x) ** 2 + Lf(x) ** 2, qc)
    return TestFunction(name, evaluator, math.sqrt(sq))


def hermite_test_function(n: int, qc: QuadratureConfig = DEFAULT_QC) -> TestFunction:
    return make_test_function(f"psi_{n}", psi(n).evaluator, qc)


def gaussian_poly(coeffs, a: float, b: float) -> Evaluator:
    """Evaluator of ``p(t) exp(-a (t - b)^2)`` with exact derivatives."""
    P = np.polynomial.Polynomial
    p = P(coeffs)
    dp, d2p = p.deriv(), p.deriv(2)

    def ev(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-a * (t - b) ** 2)
        g1 = -2.0 * a * (t - b)
        pv, dpv = p(t), dp(t)
        f = pv * e
        df = (dpv + pv * g1) * e
        d2f = (d2p(t) + 2.0 * dpv * g1 + pv * (g1 * g1 - 2.0 * a)) * e
        return f, df, d2f

    return ev


def random_test_functions(n: int = N_RANDOM, seed: int = SUITE_SEED, qc: QuadratureConfig = DEFAULT_QC) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        deg = int(rng.integers(0, 4))
        coeffs = rng.uniform(-1.0, 1.0, deg + 1)
        a = float(rng.uniform(0.5, 2.0))
        b = float(rng.uniform(-1.0, 1.0))
        out.append(make_test_function(f"gauss_poly_{k}", gaussian_poly(coeffs, a, b), qc))
    return out


def test_suite(qc: QuadratureConfig = DEFAULT_QC) -> list:
    """psi_0 .. psi_5 followed by 20 seeded Gaussian-times-polynomial functions."""
    return [hermite_test_function(n, qc) for n in range(6)] + random_test_functions(qc=qc)


test_suite.__test__ = False


# --- functionals -------------------------------------------------------------------


def pairing_with_w(f: TestFunction, index: int, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """``<L f, w_index>`` by quadrature on each half-line."""
    Lf, w = _L(f.evaluator), _w_values(index)
    x1, _ = _gl_rule(8)
    x2, _ = _gl_rule(16)
    table = {x1.size: w[0], x2.size: w[1]}
    return _integrate(lambda x: Lf(x) * table[x.size], qc)


@lru_cache(maxsize=1)
def _v_nodes():
    """``v(|x|, 0)`` at the nodes of both composite rules (the VTable calls are the slow part)."""
    return tuple(_vtable()(np.abs(_gl_rule(k)[0]))[0] for k in (8, 16))


def _w_values(index: int):
    if index == 1:
        return _v_nodes()
    return tuple(np.sign(_gl_rule(k)[0]) * v for k, v in zip((8, 16), _v_nodes()))


def pairing_with_w_adaptive(f: TestFunction, index: int, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """Same as :func:`pairing_with_w` with scalar adaptive quadrature (slow; a cross-check)."""
    Lf, w = _L(f.evaluator), _value(_w_evaluator(index))
    return _both_sides(lambda x: float(Lf(np.array([x]))[0] * w(np.array([x]))[0]), qc)


def delta_functional(f: TestFunction, qc: QuadratureConfig = DEFAULT_QC) -> float:
    return 0.5 * pairing_with_w(f, 1, qc)


def delta_prime_functional(f: TestFunction, qc: QuadratureConfig = DEFAULT_QC) -> float:
    return pairing_with_w(f, 2, qc) / (2.0 * eval_G(0.0, qc))


def boundedness_ratio(f: TestFunction) -> float:
    """``|f(0)| / ||f||_+``; never exceeds ``||w_1|| / 2``."""
    if f.plus_norm == 0.0:
        raise ValueError("zero test function")
    return abs(f.value0) / f.plus_norm


def integration_by_parts_defect(f: TestFunction, index: int, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """Relative defect of ``<L f, w> = f'(0)[w(+0) - w(-0)] + f(0)[w'(-0) - w'(+0)]``."""
    b = w_function(index, np.array([-1.0, 1.0])).boundary
    rhs = f.dvalue0 * (b.f_plus - b.f_minus).real + f.value0 * (b.df_minus - b.df_plus).real
    lhs = pairing_with_w(f, index, qc)
    return abs(lhs - rhs) / max(f.plus_norm, 1e-300)


def perturbation_identity_check(g: GridFunction, f: TestFunction, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """Discrepancy of the identity for the maximal operator on real ``g``.

    ``<f, L g> = <L f, g> - [g(+0) - g(-0)] f'(0) + [g'(+0) - g'(-0)] f(0)``,
    with ``L g`` taken on each half-line separately.
    """
    if g.evaluator is None:
        raise ValueError("g needs an evaluator")
    if np.iscomplexobj(g.values) and np.any(np.imag(g.values) != 0):
        raise ValueError("only real g is supported")
    fe, ge = f.evaluator, _on_nodes(g.evaluator)
    f0, Lf = _value(fe), _L(fe)
    g0, Lg = _value(ge), _L(ge)
    lhs = _integrate(lambda x: f0(x) * Lg(x), qc)
    b = g.boundary
    rhs = (
        _integrate(lambda x: Lf(x) * g0(x), qc)
        - (b.f_plus - b.f_minus).real * f.dvalue0
        + (b.df_plus - b.df_minus).real * f.value0
    )
    return abs(lhs - rhs)
