"""Eigenvalues of the extensions by root-finding on secular functions.

For every family an eigenfunction is ``c_- y_-`` on the left and ``c_+ y_+``
on the right, with ``y_+-`` the L2 solutions; plugging the traces into the
boundary conditions gives a homogeneous system in ``(c_-, c_+)`` whose
determinant is the secular function.  Since ``y_-(t) = y_+(-t)``, one
backward integration per ``lam`` serves all families.

The determinant is split into real, sign-carrying factors wherever it
factorizes (``BTheta``: odd and even channels; decoupled ``CK``: one factor per
side), so double eigenvalues are still bracketed by sign changes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from . import ode
from .errors import OscillatorError
from .extensions import CK, BTheta, Extension, HalfLine, ck_rows, symmetry_map
from .grid import GridFunction
from .series import DEFAULT_QC, OMEGA_MAX, QuadratureConfig, alpha_A, alpha_B, eval_G

SQRT2 = math.sqrt(2.0)
DEFAULT_STEP = 0.05
DEFAULT_WINDOW = (-60.0, 20.25)
_BATCH = 256


@dataclass(frozen=True)
class SecularSample:
    lam: float
    det_value: complex
    boundary_dir: tuple  # (y(+0), y'(+0)) of the plus-side L2 solution, sup-normalized
    factors: tuple = ()  # real, sign-carrying factors of det_value (up to constant phases)

    @property
    def magnitude(self) -> float:
        return abs(self.det_value)


@dataclass(frozen=True)
class EigenResult:
    lam: float
    residual: float
    bracket: tuple
    method: str  # secular_root | g_omega_inversion | analytic_known
    multiplicity: int = 1
    channel: Optional[str] = None  # which secular factor vanished ("odd", "even", "minus", "plus", joined by "+")


# --- secular functions ------------------------------------------------------------


def _phase(coeffs) -> complex:
    c = np.asarray(coeffs, dtype=complex)
    k = int(np.argmax(np.abs(c)))
    return np.exp(-1j * np.angle(c[k]))


def _ck_parts(K: np.ndarray):
    """Quadratic-form coefficients of the CK determinant and its factorization."""
    R = ck_rows(K)
    # M[i,0] = R[i,0] y - R[i,1] y',  M[i,1] = R[i,2] y + R[i,3] y'
    A = R[0, 0] * R[1, 2] - R[0, 2] * R[1, 0]
    B = R[0, 0] * R[1, 3] - R[0, 1] * R[1, 2] + R[0, 2] * R[1, 1] - R[0, 3] * R[1, 0]
    C = -R[0, 1] * R[1, 3] + R[0, 3] * R[1, 1]
    decoupled = abs(K[0, 1]) < 1e-13 and abs(K[1, 0]) < 1e-13
    return R, (A, B, C), decoupled


def _factors(ext: Extension, y: np.ndarray, dy: np.ndarray):
    """Return ``(det, [real factors])`` for arrays of plus-side traces."""
    if isinstance(ext, HalfLine):
        c, s = math.cos(ext.theta), math.sin(ext.theta)
        # y_-(-0) = y, y_-'(-0) = -y'
        f = c * y - s * dy if ext.side == "plus" else c * y + s * dy
        return f.astype(complex), [f]
    if isinstance(ext, BTheta):
        c, s = math.cos(ext.theta), math.sin(ext.theta)
        even = SQRT2 * c * y - 2.0 * s * dy
        return (y * even).astype(complex), [y, even]
    if isinstance(ext, CK):
        R, (A, B, C), decoupled = _ck_parts(ext.matrix)
        det = A * y * y + B * y * dy + C * dy * dy
        if decoupled:
            m00 = R[0, 0] * y - R[0, 1] * dy
            m11 = R[1, 2] * y + R[1, 3] * dy
            return det, [
                np.real(m00 * _phase(R[0, :2])),
                np.real(m11 * _phase(R[1, 2:])),
            ]
        return det, [np.real(det * _phase([A, B, C]))]
    raise TypeError(f"not an extension: {ext!r}")


def _channels(ext: Extension) -> tuple:
    if isinstance(ext, BTheta):
        return ("odd", "even")
    if isinstance(ext, CK) and _ck_parts(ext.matrix)[2]:
        return ("minus", "plus")
    return (None,)


def secular(ext: Extension, lam: float, tol: float = 1e-11) -> SecularSample:
    """Secular determinant of ``ext`` at ``lam`` (sup-normalized L2 solutions)."""
    sol = ode.build_l2_solution(lam, ode.PLUS, tol)
    y, dy = np.array([sol.value0]), np.array([sol.dvalue0])
    det, facs = _factors(ext, y, dy)
    return SecularSample(float(lam), complex(det[0]), (sol.value0, sol.dvalue0), tuple(float(f[0]) for f in facs))


def _unit_directions(lams: np.ndarray, tol: float):
    y = np.empty_like(lams)
    dy = np.empty_like(lams)
    for i in range(0, lams.size, _BATCH):
        sl = slice(i, i + _BATCH)
        y[sl], dy[sl] = ode.boundary_directions(lams[sl], tol, unit=True)
    return y, dy


def btheta_angle(lam, tol: float = 1e-11) -> np.ndarray:
    """The unique ``theta in [0, pi)`` whose ``BTheta`` has ``lam`` as an even eigenvalue."""
    y, dy = _unit_directions(np.atleast_1d(np.asarray(lam, dtype=float)), tol)
    return np.mod(np.arctan2(SQRT2 * y, 2.0 * dy), math.pi)


def halfline_angle(lam, side: str = "plus", tol: float = 1e-11) -> np.ndarray:
    """The unique ``theta in [0, pi)`` whose half-line extension has eigenvalue ``lam``."""
    y, dy = _unit_directions(np.atleast_1d(np.asarray(lam, dtype=float)), tol)
    if side == "minus":
        dy = -dy
    return np.mod(np.arctan2(y, dy), math.pi)


# --- root finding -------------------------------------------------------------------


def _sign_brackets(lams: np.ndarray, vals: np.ndarray, zero_tol: float = 1e-12):
    """Sign-change brackets; samples with ``|v| <= zero_tol`` count as roots themselves."""
    s = np.where(np.abs(vals) <= zero_tol, 0.0, np.sign(vals))
    out = []
    for i in range(len(lams)):
        if s[i] == 0.0:
            if i == 0 or s[i - 1] != 0.0:
                out.append((lams[i], lams[i]))
        elif i + 1 < len(lams) and s[i] * s[i + 1] < 0:
            out.append((lams[i], lams[i + 1]))
    return out


def _refine(ext: Extension, which: int, brackets, tol: float, ode_tol: float):
    """Vectorized Illinois regula falsi on all brackets.

    Iterates until each bracket is narrower than ``tol`` or the iterate
    stalls; stalled iterates are then certified by probing just inside ``x -+ tol/2``.
    """
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    if lo.size == 0:
        return lo, lo, hi

    def f(x):
        if x.size == 0:
            return x
        y, dy = _unit_directions(x, ode_tol)
        return _factors(ext, y, dy)[1][which]

    both = f(np.concatenate([lo, hi]))
    flo, fhi = both[: lo.size], both[lo.size :]
    x = 0.5 * (lo + hi)
    done = (hi - lo) <= tol
    last = np.zeros(lo.size, dtype=int)  # side moved last round: -1 lo, +1 hi
    for _ in range(100):
        open_ = ~done
        if not np.any(open_):
            break
        a, b, fa, fb = lo[open_], hi[open_], flo[open_], fhi[open_]
        with np.errstate(invalid="ignore", divide="ignore"):
            xn = (a * fb - b * fa) / (fb - fa)
        bad = ~np.isfinite(xn) | (xn <= a) | (xn >= b)
        xn = np.where(bad, 0.5 * (a + b), xn)
        fx = f(xn)
        idx = np.flatnonzero(open_)
        for k, i in enumerate(idx):
            if fx[k] == 0.0:
                lo[i] = hi[i] = xn[k]
                done[i] = True
                x[i] = xn[k]
                continue
            if np.sign(fx[k]) == np.sign(flo[i]):
                lo[i], flo[i] = xn[k], fx[k]
                if last[i] == -1:
                    fhi[i] *= 0.5
                last[i] = -1
            else:
                hi[i], fhi[i] = xn[k], fx[k]
                if last[i] == 1:
                    flo[i] *= 0.5
                last[i] = 1
            stalled = abs(xn[k] - x[i]) < 0.1 * tol
            x[i] = xn[k]
            done[i] = (hi[i] - lo[i]) <= tol or stalled
    # certify stalled iterates with a bracket of width tol around them
    wide = np.flatnonzero((hi - lo) > tol)
    if wide.size:
        a, b = x[wide] - 0.45 * tol, x[wide] + 0.45 * tol
        fab = f(np.concatenate([a, b]))
        fa, fb = fab[: wide.size], fab[wide.size :]
        ok = np.sign(fa) != np.sign(fb)
        lo[wide[ok]], hi[wide[ok]] = a[ok], b[ok]
    root = np.where(lo == hi, lo, x)
    return np.clip(root, lo, hi), lo, hi


def eigenvalues_in(
    ext: Extension,
    lo: float,
    hi: float,
    max_count: Optional[int] = None,
    tol: float = 1e-9,
    step: float = DEFAULT_STEP,
    ode_tol: float = 1e-11,
) -> list[EigenResult]:
    """All eigenvalues of ``ext`` in ``[lo, hi]``, sorted, refined to ``|d lam| < tol``."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    n = int(math.ceil((hi - lo) / step))
    lams = lo + step * np.arange(n + 1)
    lams[-1] = hi
    y, dy = _unit_directions(lams, ode_tol)
    _, facs = _factors(ext, y, dy)

    names = _channels(ext)
    roots = []
    for which, vals in enumerate(facs):
        brackets = _sign_brackets(lams, vals)
        r, a, b = _refine(ext, which, brackets, tol, ode_tol)
        roots.extend((x, y, z, names[which]) for x, y, z in zip(r, a, b))
    roots.sort(key=lambda row: row[0])

    merged: list[list] = []
    for r, a, b, name in roots:
        if merged and abs(r - merged[-1][0]) < 10 * tol:
            merged[-1][3] += 1
            merged[-1][1] = min(merged[-1][1], a)
            merged[-1][2] = max(merged[-1][2], b)
            merged[-1][4] = "+".join(sorted(filter(None, {merged[-1][4], name}))) or None
        else:
            merged.append([r, a, b, 1, name])
    for x, z in zip(merged, merged[1:]):
        if z[0] - x[0] < 2 * step:
            warnings.warn(
                f"eigenvalues {x[0]:.6g} and {z[0]:.6g} are closer than twice the scan step {step}",
                RuntimeWarning,
                stacklevel=2,
            )
    if max_count is not None:
        merged = merged[:max_count]
    out = []
    if merged:
        at = np.array([m[0] for m in merged])
        yr, dyr = _unit_directions(at, ode_tol)
        det, _ = _factors(ext, yr, dyr)
        for m, d in zip(merged, np.abs(det)):
            out.append(EigenResult(float(m[0]), float(d), (float(m[1]), float(m[2])), "secular_root", m[3], m[4]))
    return out


# --- negative eigenvalues through G(omega) ------------------------------------------


def _invert_G(target: float, qc: QuadratureConfig, tol: float) -> tuple[float, float]:
    """``omega`` with ``G(omega) = target`` for ``0 < target < G(0)``; G is decreasing."""
    w_hi = 1.0
    while eval_G(w_hi, qc) > target:
        if w_hi >= OMEGA_MAX:
            raise OscillatorError(f"G^-1({target:.3g}) exceeds omega <= {OMEGA_MAX}")
        w_hi = min(2.0 * w_hi, OMEGA_MAX)
    w_lo = 0.0 if w_hi == 1.0 else w_hi / 2.0
    xtol = 0.05 * tol / (2.0 * w_hi + 1.0)
    w = optimize.brentq(lambda w: eval_G(w, qc) - target, w_lo, w_hi, xtol=xtol, rtol=1e-15)
    return w, xtol


def negative_eigenvalue(theta: float, qc: QuadratureConfig = DEFAULT_QC, tol: float = 1e-9) -> Optional[EigenResult]:
    """Non-positive eigenvalue of ``BTheta(theta)``, or ``None``.

    Negative iff ``theta in (pi - alpha_B, pi)``; zero at the threshold.
    Solves ``tan(theta) = -G(omega)/sqrt(2)`` and returns ``lam = -omega^2``.
    """
    BTheta(theta)  # validates
    thr = math.pi - alpha_B(qc)
    return _negative(theta - thr, -SQRT2 * math.tan(theta), lambda w: math.tan(theta) + eval_G(w, qc) / SQRT2, qc, tol)


def negative_eigenvalue_halfline(
    theta: float, side: str = "plus", qc: QuadratureConfig = DEFAULT_QC, tol: float = 1e-9
) -> Optional[EigenResult]:
    """Non-positive eigenvalue of the half-line extension.

    Plus side: negative iff ``theta in (pi - alpha_A, pi)`` with ``tan(theta) = -G(omega)``.
    Minus side: the reflected family, negative iff ``theta in (0, alpha_A)``.
    """
    HalfLine(side, theta)
    if side == "minus":
        theta, _ = symmetry_map(theta, "minus")
    thr = math.pi - alpha_A(qc)
    return _negative(theta - thr, -math.tan(theta), lambda w: math.tan(theta) + eval_G(w, qc), qc, tol)


def _negative(offset: float, target: float, residual, qc, tol) -> Optional[EigenResult]:
    if abs(offset) <= 1e-12:
        return EigenResult(0.0, abs(residual(0.0)), (0.0, 0.0), "analytic_known")
    if offset < 0:
        return None
    w, xtol = _invert_G(target, qc, tol)
    lam = -w * w
    return EigenResult(lam, abs(residual(w)), (-((w + xtol) ** 2), -max(w - xtol, 0.0) ** 2), "g_omega_inversion")


# --- quadratic form -----------------------------------------------------------------


def form_positivity(f: GridFunction, side: str = "plus", support_tol: float = 1e-10) -> float:
    """``int |f'|^2 + t^2 |f|^2`` over one half-line for compactly supported ``f``.

    Raises ``ValueError`` unless ``f`` vanishes near 0 and near the grid end.
    """
    mask = f.plus if side == "plus" else f.minus
    t, v, dv = f.grid[mask], f.values[mask], f.d_values[mask]
    if t.size < 5:
        raise ValueError("too few grid points on that side")
    ref = max(float(np.max(np.abs(v))), 1e-300)
    order = np.argsort(np.abs(t))
    near0, far = order[:3], order[-3:]
    if np.max(np.abs(v[near0])) > support_tol * ref or np.max(np.abs(v[far])) > support_tol * ref:
        raise ValueError("f must vanish near 0 and near the end of the grid")
    if f.evaluator is not None:
        a, b = (0.0, float(t.max())) if side == "plus" else (float(t.min()), 0.0)

        def integrand(x):
            g, dg, _ = f.evaluator(np.array([x]))
            return float(abs(dg[0]) ** 2 + x * x * abs(g[0]) ** 2)

        return integrate.quad(integrand, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return float(integrate.simpson(np.abs(dv) ** 2 + t * t * np.abs(v) ** 2, x=t))
