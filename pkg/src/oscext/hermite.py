"""Oscillator eigenfunctions, the explicit solutions phi_1, phi_+-, and ladder maps.

The normalization uses ``c_n = (sqrt(pi) 2^n n!)^(-1/2)``; in particular
``psi_0(0) = pi^(-1/4)``.  (The ``pi^(-1/2)`` prefactor sometimes quoted for
``psi_0`` is not normalized.)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import AccuracyBudgetError
from .grid import BoundaryData, GridFunction, default_grid, from_evaluator

MAX_INDEX = 60
PHI_RANGE = 8.0
MAX_LADDER = 8


@dataclass(frozen=True)
class HermiteFunction:
    n: int
    poly_coeffs: tuple  # integer coefficients of H_n, ascending powers
    norm_const: float
    log_norm_const: float

    def poly(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), [float(c) for c in self.poly_coeffs])

    def __call__(self, t):
        return _psi_table(self.n, np.asarray(t, dtype=float))[self.n]

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        table = _psi_table(self.n, t)
        # psi_n' = -t psi_n + sqrt(2n) psi_{n-1}
        d = -t * table[self.n]
        if self.n > 0:
            d = d + math.sqrt(2.0 * self.n) * table[self.n - 1]
        return d

    @property
    def eigenvalue(self) -> float:
        return self.n + 0.5

    def evaluator(self, t):
        f = self(t)
        return f, self.derivative(t), (np.asarray(t) ** 2 - 2.0 * self.eigenvalue) * f

    def grid_function(self, grid: Optional[np.ndarray] = None) -> GridFunction:
        return from_evaluator(self.evaluator, grid)


def hermite_coeffs(n: int) -> tuple:
    """Exact integer coefficients of ``H_n`` via ``H_{k+1} = 2t H_k - 2k H_{k-1}``."""
    prev, cur = [1], [0, 2]
    if n == 0:
        return (1,)
    for k in range(1, n):
        nxt = [0] * (k + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(prev):
            nxt[i] -= 2 * k * c
        prev, cur = cur, nxt
    return tuple(cur)


def _psi_table(n: int, t: np.ndarray) -> np.ndarray:
    """Rows ``psi_0 .. psi_n`` at ``t`` by the normalized three-term recurrence."""
    out = np.empty((n + 1,) + t.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * t * t)
    if n >= 1:
        out[1] = math.sqrt(2.0) * t * out[0]
    for k in range(1, n):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * t * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def psi(n: int) -> HermiteFunction:
    if not 0 <= n <= MAX_INDEX:
        raise ValueError(f"index {n} outside [0, {MAX_INDEX}]")
    log_c = -0.5 * (0.5 * math.log(math.pi) + n * math.log(2.0) + math.lgamma(n + 1))
    return HermiteFunction(n, hermite_coeffs(n), math.exp(log_c), log_c)


# --- explicit solutions of (A + 1/2) f = 0 -------------------------------------


def _guard(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > PHI_RANGE):
        raise ValueError(f"|t| must not exceed {PHI_RANGE}")
    return t


def _out(t, val):
    return float(val) if np.ndim(t) == 0 else val


def phi_one(t):
    """``exp(t^2/2)``."""
    x = _guard(t)
    return _out(t, np.exp(0.5 * x * x))


def phi_plus(t):
    """``exp(t^2/2) int_t^inf exp(-s^2) ds``, via the scaled erfc."""
    x = _guard(t)
    return _out(t, 0.5 * math.sqrt(math.pi) * np.exp(-0.5 * x * x) * special.erfcx(x))


def phi_minus(t):
    """``phi_plus(-t)``."""
    x = _guard(t)
    return _out(t, phi_plus(-x))


def phi_plus_prime(t):
    x = _guard(t)
    return _out(t, x * phi_plus(x) - np.exp(-0.5 * x * x))


def phi_minus_prime(t):
    x = _guard(t)
    return _out(t, x * phi_minus(x) + np.exp(-0.5 * x * x))


# --- ladder maps on grid data ----------------------------------------------------


def _second_derivative(f: GridFunction, eigenvalue: Optional[float]):
    """``f''`` on the grid and at the two one-sided limits."""
    b = f.boundary
    if eigenvalue is not None:
        pot = f.grid**2 - 2.0 * eigenvalue
        return pot * f.values, -2.0 * eigenvalue * b.f_minus, -2.0 * eigenvalue * b.f_plus
    d2 = np.empty_like(f.d_values)
    limits = {}
    for sign in (-1, 1):
        t, _, df = f.side(sign)
        if t.size < 6:
            raise ValueError("grid too coarse: need at least 5 points per side")
        g = np.gradient(df, t, edge_order=2)
        if sign > 0:
            d2[f.plus], limits[1] = g[1:], g[0]
        else:
            d2[f.minus], limits[-1] = g[:-1], g[-1]
    return d2, limits[-1], limits[1]


def _ladder(f: GridFunction, sign: int, eigenvalue: Optional[float]) -> GridFunction:
    # sign=+1: t - d/dt (raise);  sign=-1: d/dt + t (lower)
    t = f.grid
    d2, d2m, d2p = _second_derivative(f, eigenvalue)
    b = f.boundary
    if sign > 0:
        vals = t * f.values - f.d_values
        dvals = f.values + t * f.d_values - d2
        bnd = BoundaryData(-b.df_minus, b.f_minus - d2m, -b.df_plus, b.f_plus - d2p)
    else:
        vals = f.d_values + t * f.values
        dvals = d2 + f.values + t * f.d_values
        bnd = BoundaryData(b.df_minus, d2m + b.f_minus, b.df_plus, d2p + b.f_plus)
    evaluator = None
    if eigenvalue is not None and f.evaluator is not None:
        new_ev = eigenvalue + sign
        inner = f.evaluator

        def evaluator(x, _inner=inner, _lam=eigenvalue, _new=new_ev, _s=sign):
            x = np.asarray(x, dtype=float)
            g, dg, _ = _inner(x)
            d2g = (x * x - 2.0 * _lam) * g
            if _s > 0:
                h, dh = x * g - dg, g + x * dg - d2g
            else:
                h, dh = dg + x * g, d2g + g + x * dg
            return h, dh, (x * x - 2.0 * _new) * h

    return GridFunction(t, vals, dvals, bnd, evaluator)


def ladder_raise(f: GridFunction, eigenvalue: Optional[float] = None) -> GridFunction:
    """Apply ``t - d/dt``.

    If ``eigenvalue`` (``A f = eigenvalue f``) is given, ``f''`` comes from the
    equation and the result is exact; otherwise second differences of
    ``d_values`` are used, which is only O(h^2) accurate.
    """
    return _ladder(f, +1, eigenvalue)


def ladder_lower(f: GridFunction, eigenvalue: Optional[float] = None) -> GridFunction:
    """Apply ``d/dt + t``; see :func:`ladder_raise` for the accuracy options."""
    return _ladder(f, -1, eigenvalue)


def _phi_pm_evaluator(x):
    """``phi_+`` on t >= +0 and ``phi_-`` on t <= -0: the n = 0 member of the ladder family."""
    x = np.asarray(x, dtype=float)
    neg = np.signbit(x)
    f = np.where(neg, phi_minus(x), phi_plus(x))
    df = np.where(neg, phi_minus_prime(x), phi_plus_prime(x))
    return f, df, (x * x + 1.0) * f


def _ladder_symbolic(n: int, t: np.ndarray, sign: int) -> np.ndarray:
    """``(d/dt + t)^n phi_+`` (sign=+1) or ``phi_-`` (sign=-1) in closed form.

    Writing ``phi_+ = e^{t^2/2} E`` with ``E = int_t^inf e^{-s^2}``, one has
    ``(d/dt + t)^n phi_+ = e^{t^2/2} (p_n E + q_n e^{-t^2})`` with
    ``p_{k+1} = p_k' + 2t p_k`` and ``q_{k+1} = q_k' - p_k``.
    """
    P = np.polynomial.Polynomial
    p, q = P([1.0]), P([0.0])
    two_t = P([0.0, 2.0])
    for _ in range(n):
        p, q = p.deriv() + two_t * p, q.deriv() - p
    x = sign * t
    E = 0.5 * math.sqrt(math.pi) * special.erfcx(x)  # e^{x^2} int_x^inf e^{-s^2}
    # phi_- = phi_+(-t) and d/dt flips sign under t -> -t
    val = np.exp(-0.5 * x * x) * (p(x) * E + q(x))
    return val * (sign**n)


def ladder_eigenfunction(n: int, grid: Optional[np.ndarray] = None, budget: float = 1e-9) -> GridFunction:
    """``u_n``: ``(d/dt + t)^n phi_+`` on t > 0 and ``(d/dt + t)^n phi_-`` on t < 0.

    Solves ``(A + n + 1/2) u_n = 0`` on each half-line.  Derivatives are carried
    exactly through the equation; the result is checked against the closed form
    and ``AccuracyBudgetError`` is raised if they disagree by more than ``budget``
    relative to the sup norm.
    """
    if not 1 <= n <= MAX_LADDER:
        raise ValueError(f"ladder index {n} outside [1, {MAX_LADDER}]")
    g = default_grid(PHI_RANGE) if grid is None else np.asarray(grid, dtype=float)
    f = from_evaluator(_phi_pm_evaluator, g)
    lam = -0.5
    for _ in range(n):
        f = ladder_lower(f, lam)
        lam -= 1.0
    ref = np.where(g < 0, _ladder_symbolic(n, g, -1), _ladder_symbolic(n, g, +1))
    err = float(np.max(np.abs(ref - f.values)) / max(f.sup_norm(), 1e-300))
    if err > budget:
        raise AccuracyBudgetError(f"ladder function u_{n}: estimated error {err:.3g} exceeds {budget:.3g}")
    return f
