"""Square-integrable solutions of ``-y''/2 + t^2 y/2 = lam y`` on a half-line.

The decaying solution is obtained by integrating from ``start_T`` (beyond
the turning point ``t^2 = 2 lam``) back to the origin, seeded with the
leading Liouville-Green direction ``y'/y = -sqrt(T^2 - 2 lam)``.  Backward
integration damps the growing solution, so only the boundary direction at 0
carries meaning; it is stable under enlarging ``start_T``.

Several values of ``lam`` can be integrated as one system
(:func:`boundary_directions`), which is how spectral scans stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .grid import BoundaryData, GridFunction, default_grid

PLUS, MINUS = "plus", "minus"
TURNING_MARGIN = 0.5
SUP_PROBES = 2001


def default_start(lam: float) -> float:
    return math.sqrt(2.0 * max(lam, 0.0) + 1.0) + 6.0


def _check_start(lams: np.ndarray, T: float):
    need = np.sqrt(2.0 * np.maximum(lams, 0.0)) + TURNING_MARGIN
    if np.any(T < need):
        raise IntegrationError(f"start_T={T} is not beyond the turning point (need >= {need.max():.4g})")


def _integrate(lams: np.ndarray, T: float, tol: float, t_eval: Optional[np.ndarray] = None, dense: bool = True):
    """Integrate all ``lams`` from T down to 0 as one system.

    Returns ``(y0, dy0, sup, sol)``; ``sup`` is the max of ``|y|`` sampled
    from the dense interpolant on a fixed grid over ``[0, T]`` (None when
    ``dense`` is off).
    """
    lams = np.asarray(lams, dtype=float)
    n = lams.size
    _check_start(lams, T)
    two_lam = 2.0 * lams

    def rhs(t, z):
        return np.concatenate([z[n:], (t * t - two_lam) * z[:n]])

    z0 = np.concatenate([np.ones(n), -np.sqrt(T * T - two_lam)])
    # solve_ivp controls the RMS over components; tighten so each lam gets ~tol/10
    rtol = max(tol / (10.0 * math.sqrt(n)), 2.5e-14)
    sol = solve_ivp(
        rhs, (T, 0.0), z0, method="DOP853", rtol=rtol, atol=rtol * 1e-6, t_eval=t_eval, dense_output=dense
    )
    if sol.status != 0:
        raise IntegrationError(f"backward integration failed: {sol.message}")
    end = sol.y[:, -1]  # t = 0 (t_eval, when given, also ends at 0)
    if not dense:
        return end[:n], end[n:], None, sol
    # the step sequence does not depend on t_eval, so neither does this scale
    probe = sol.sol(np.linspace(0.0, T, SUP_PROBES))[:n]
    sup = np.maximum(np.max(np.abs(probe), axis=1), np.abs(end[:n]))
    return end[:n], end[n:], sup, sol


@dataclass(frozen=True)
class L2Solution:
    """Decaying solution on one half-line, normalized to sup-norm 1 on ``[0, start_T]``."""

    lam: float
    side: str
    start_T: float
    value0: float
    dvalue0: float
    samples: Optional[GridFunction] = None
    scale: str = "sup-norm-1"

    @property
    def direction(self) -> np.ndarray:
        v = np.array([self.value0, self.dvalue0])
        return v / np.linalg.norm(v)

    def boundary_data(self) -> BoundaryData:
        nan = complex("nan")
        if self.side == PLUS:
            return BoundaryData(nan, nan, self.value0, self.dvalue0)
        return BoundaryData(self.value0, self.dvalue0, nan, nan)


def projective_distance(a, b) -> float:
    """Sine of the angle between two boundary directions in R^2."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(abs(a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b)))


def boundary_directions(lams, tol: float = 1e-10, start_T: Optional[float] = None, unit: bool = False):
    """``(value0, dvalue0)`` of the plus-side L2 solution for each ``lam``, sup-normalized.

    All ``lams`` share one ``start_T`` (the largest default among them).
    ``unit=True`` scales each pair to length 1 instead, which skips the
    dense interpolant and is noticeably cheaper.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    T = max(default_start(float(l)) for l in lams) if start_T is None else float(start_T)
    y0, dy0, sup, _ = _integrate(lams, T, tol, dense=not unit)
    if unit:
        sup = np.hypot(y0, dy0)
    return y0 / sup, dy0 / sup


def build_l2_solution(
    lam: float,
    side: str = PLUS,
    tol: float = 1e-10,
    start_T: Optional[float] = None,
    grid: Optional[np.ndarray] = None,
    verify: bool = False,
) -> L2Solution:
    """The (unique up to scale) L2 solution on one half-line.

    ``grid`` (positive abscissae, for side=plus; mirrored for side=minus)
    requests a tabulation.  ``verify`` redoes the integration from
    ``2 start_T`` and raises if the boundary direction moves by more than ``tol``.
    The minus-side solution is the reflection ``y_-(t) = y_+(-t)``; the
    equation is even in ``t``.
    """
    if side not in (PLUS, MINUS):
        raise ValueError(f"side must be '{PLUS}' or '{MINUS}'")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lam = float(lam)
    T = default_start(lam) if start_T is None else float(start_T)

    t_eval = None
    if grid is not None:
        g = np.abs(np.asarray(grid, dtype=float))
        g = np.unique(g[(g > 0) & (g <= T)])
        t_eval = np.concatenate([g[::-1], [0.0]])
        if t_eval[0] != T:
            t_eval = np.concatenate([[T], t_eval])
    y0, dy0, sup, sol = _integrate(np.array([lam]), T, tol, t_eval)
    v0, d0 = float(y0[0] / sup[0]), float(dy0[0] / sup[0])
    if v0 == 0.0 and d0 == 0.0:
        raise IntegrationError("degenerate boundary data")

    if verify:
        y2, dy2, _, _ = _integrate(np.array([lam]), 2.0 * T, tol)
        dist = projective_distance((v0, d0), (y2[0], dy2[0]))
        if dist > tol:
            raise IntegrationError(f"projective limit not converged: moved by {dist:.3g} > {tol:.3g}")

    samples = None
    if t_eval is not None:
        tt = sol.t[::-1][1:]  # increasing, 0 dropped
        vals = sol.y[0][::-1][1:] / sup[0]
        dvals = sol.y[1][::-1][1:] / sup[0]
        keep = tt > 0
        tt, vals, dvals = tt[keep], vals[keep], dvals[keep]
        nan = complex("nan")
        if side == PLUS:
            samples = GridFunction(tt, vals, dvals, BoundaryData(nan, nan, v0, d0))
        else:
            samples = GridFunction(-tt[::-1], vals[::-1], -dvals[::-1], BoundaryData(v0, -d0, nan, nan))
    if side == MINUS:
        d0 = -d0
    return L2Solution(lam, side, T, v0, d0, samples)


def mirror_extend(y: L2Solution, grid: Optional[np.ndarray] = None) -> GridFunction:
    """Even extension ``y(x) = y_+(|x|)`` as a two-sided grid function.

    Without stored samples the solution is re-tabulated on the default grid
    restricted to ``[-start_T, start_T]``.
    """
    if y.side != PLUS:
        raise ValueError("mirror_extend expects a plus-side solution")
    if y.samples is None or grid is not None:
        g = default_grid(y.start_T) if grid is None else grid
        y = build_l2_solution(y.lam, PLUS, start_T=y.start_T, grid=g)
    s = y.samples
    t, v, dv = s.grid, s.values, s.d_values
    grid2 = np.concatenate([-t[::-1], t])
    vals = np.concatenate([v[::-1], v])
    dvals = np.concatenate([-dv[::-1], dv])
    b = BoundaryData(y.value0, -y.dvalue0, y.value0, y.dvalue0)
    return GridFunction(grid2, vals, dvals, b)
