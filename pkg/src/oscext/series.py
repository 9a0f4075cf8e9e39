"""Even power-series solution of the negative-energy oscillator equation.

For ``omega >= 0`` the function ``u(t, omega)`` solves

    -u''/2 + t^2 u/2 = -omega^2 u,    u(0) = 1,  u'(0) = 0,

and is expanded as ``sum_n a_{2n} t^{2n}``.  From it we build the decaying
companion ``v(t) = u(t) * int_t^inf u^-2`` and ``G(omega) = v(0)``.

Coefficients are kept in log space as well, since for large ``omega`` the
certification index ``n0`` reaches the thousands and the factorial-scaled
coefficients leave the double range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .errors import QuadratureError, SeriesBudgetError

OMEGA_MAX = 64.0
DEFAULT_TERMS = 256
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    # fraction of abs_tol granted to the discarded tail of improper integrals
    cutoff_margin: float = 0.1

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.cutoff_margin > 0):
            raise ValueError("tolerances and cutoff_margin must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QC = QuadratureConfig()


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """Coefficients ``a_{2n}(omega)`` plus the data certifying the factorial bound."""

    omega: float
    coeffs: np.ndarray
    log_coeffs: np.ndarray
    log_q: float
    n0: int

    @property
    def q_bound(self) -> float:
        # overflows to inf beyond omega ~ 20; log_q stays finite
        return math.exp(self.log_q) if self.log_q < 709.0 else math.inf

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)


def certification_index(omega: float) -> int:
    """Smallest ``n0 >= 1`` with ``omega^2/(2n+1) + n/(2(2n+1)) < 1`` for all ``n >= n0``."""
    w2 = omega * omega
    # the ratio is monotone in n; for w2 <= 1/4 it stays below 1/4
    n = max(1, int((2.0 * w2 - 2.0) / 3.0) - 2)
    while (w2 + 0.5 * n) / (2 * n + 1) >= 1.0:
        n += 1
    return n


def _check_omega(omega: float) -> float:
    omega = float(omega)
    if not omega >= 0.0:
        raise ValueError(f"omega must be nonnegative, got {omega}")
    if omega > OMEGA_MAX:
        raise ValueError(f"omega={omega} exceeds the supported range [0, {OMEGA_MAX}]")
    return omega


@lru_cache(maxsize=256)
def build_series(omega: float, n_terms: int | None = None) -> SeriesSolution:
    """Coefficients ``a_0 .. a_{2(n_terms-1)}`` from the three-term recursion.

    The default budget is the larger of 256 terms and ``n0 + 2``.
    """
    omega = _check_omega(omega)
    n0 = certification_index(omega)
    if n_terms is None:
        n_terms = max(DEFAULT_TERMS, n0 + 2)
    if n_terms < 3:
        raise ValueError("need at least 3 terms")
    if n_terms < n0 + 1:
        raise ValueError(f"n_terms={n_terms} cannot certify n0={n0} for omega={omega}")

    w2 = omega * omega
    coeffs = np.empty(n_terms)
    logs = np.empty(n_terms)
    coeffs[0], coeffs[1] = 1.0, w2
    logs[0] = 0.0
    logs[1] = math.log(w2) if w2 > 0 else -math.inf
    log_2w2 = math.log(2.0 * w2) if w2 > 0 else -math.inf
    for n in range(1, n_terms - 1):
        den = (2 * n + 2) * (2 * n + 1)
        coeffs[n + 1] = (2.0 * w2 * coeffs[n] + coeffs[n - 1]) / den
        logs[n + 1] = np.logaddexp(log_2w2 + logs[n], logs[n - 1]) - math.log(den)
    coeffs.flags.writeable = False
    logs.flags.writeable = False

    scaled = [special.gammaln(n + 1) + logs[n] for n in range(1, n0 + 1)]
    log_q = max(0.0, max(scaled))
    return SeriesSolution(omega, coeffs, logs, float(log_q), n0)


def _partial_sums(s: SeriesSolution, t: np.ndarray, rel_tol: float, derivative: bool):
    """Truncated sums at each ``t`` with the certified truncation rule."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    # group by size of t; small t needs far fewer terms (about e t^2 + n0)
    order = np.argsort(t, kind="stable")
    out = np.empty_like(t)
    for i in range(0, t.size, 512):
        sel = order[i : i + 512]
        ts = t[sel]
        m = min(s.n_terms, max(s.n0 + 2, int(3.0 * float(ts[-1]) ** 2) + 64))
        try:
            out[sel] = _partial_sums_upto(s, ts, rel_tol, derivative, m)
        except SeriesBudgetError:
            if m == s.n_terms:
                raise
            out[sel] = _partial_sums_upto(s, ts, rel_tol, derivative, s.n_terms)
    return out


def _partial_sums_upto(s: SeriesSolution, t: np.ndarray, rel_tol: float, derivative: bool, m: int):
    n = np.arange(m)
    la = s.log_coeffs[:m]
    out = np.empty_like(t)
    pos = t > 0
    out[~pos] = 0.0 if derivative else 1.0
    if not np.any(pos):
        return out
    tp = t[pos][:, None]
    logt = np.log(tp)
    with np.errstate(invalid="ignore"):
        if derivative:
            # 2n a_{2n} t^{2n-1}; the n = 0 term vanishes
            lterm = np.where(n > 0, np.log(np.maximum(2 * n, 1)) + la + (2 * n - 1) * logt, -np.inf)
        else:
            lterm = la + 2 * n * logt
    terms = np.exp(lterm)
    partial = np.cumsum(terms, axis=1)

    # anchored factorial bound a_{2k} <= Q_N / k! for k >= N-1, valid once N >= n0
    lfact = special.gammaln(n + 1)
    scaled = lfact + la
    logQ = np.maximum(scaled, np.concatenate([[-np.inf], scaled[:-1]]))
    t2 = tp * tp
    if derivative:
        ratio = 1.0 - t2 / (n + 1)
        ltail = math.log(2.0) + logt + logQ + 2 * n * logt - lfact
    else:
        ratio = 1.0 - t2 / (n + 2)
        ltail = logQ + 2 * (n + 1) * logt - special.gammaln(n + 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        ltail = np.where(ratio > 0, ltail - np.log(np.where(ratio > 0, ratio, 1.0)), np.inf)
        lpart = np.log(partial)
        ok = (n >= max(s.n0, 1)) & (ltail <= math.log(rel_tol) + lpart)
        ok &= lterm <= math.log(rel_tol / 10.0) + lpart
    if not np.all(ok.any(axis=1)):
        bad = float(tp[~ok.any(axis=1), 0].max())
        raise SeriesBudgetError(
            f"{m} terms cannot certify rel_tol={rel_tol} at t={bad} (omega={s.omega})"
        )
    idx = ok.argmax(axis=1)
    out[pos] = partial[np.arange(len(idx)), idx]
    return out


def eval_u(s: SeriesSolution, t, rel_tol: float = 1e-14):
    """``u(t, omega)``; scalar in, scalar out, arrays are evaluated elementwise."""
    res = _partial_sums(s, t, rel_tol, derivative=False)
    return float(res[0]) if np.ndim(t) == 0 else res


def eval_u_prime(s: SeriesSolution, t, rel_tol: float = 1e-14):
    """``u'(t, omega)`` by term-by-term differentiation; exactly 0 at ``t = 0``."""
    res = _partial_sums(s, t, rel_tol, derivative=True)
    return float(res[0]) if np.ndim(t) == 0 else res


def tail_bound(omega: float, S: float) -> float:
    """Closed-form majorant of ``int_S^inf u(s, omega)^-2 ds``.

    Uses ``u(s,omega) >= cosh(s^2/3)`` and ``u(s,omega) >= cosh(sqrt(2) omega s)``.
    """
    b = math.sqrt(6.0 * math.pi) * special.erfc(S * math.sqrt(2.0 / 3.0))
    if omega > 0:
        b = min(b, math.sqrt(2.0) / omega * math.exp(-2.0 * math.sqrt(2.0) * omega * S))
    return b


def cutoff(omega: float, t: float, budget: float) -> float:
    """Smallest ``S >= t`` (bracketed to 1e-6) with ``tail_bound(omega, S) <= budget``."""
    if tail_bound(omega, t) <= budget:
        return t
    hi = t + 1.0
    while tail_bound(omega, hi) > budget:
        hi = t + 2.0 * (hi - t)
    f = lambda S: math.log(max(tail_bound(omega, S), 1e-300)) - math.log(budget)
    return optimize.brentq(f, t, hi, xtol=1e-6) + 1e-6


def _quad(fun, a, b, qc: QuadratureConfig, epsabs: float):
    if b <= a:
        return 0.0
    val, err, info = integrate.quad(
        fun, a, b, epsabs=epsabs, epsrel=qc.rel_tol, limit=qc.max_subdivisions, full_output=1
    )[:3]
    if err > max(epsabs, qc.rel_tol * abs(val)) * 10 or info.get("last", 0) >= qc.max_subdivisions:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge (err~{err:.3g})")
    return val


def eval_v(s: SeriesSolution, t: float, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """``v(t, omega) = u(t) int_t^inf u(s)^-2 ds`` with a certified cutoff."""
    t = float(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    ut = eval_u(s, t)
    tail_budget = qc.cutoff_margin * qc.abs_tol / ut
    S = cutoff(s.omega, t, tail_budget)
    integrand = lambda x: eval_u(s, x) ** -2
    inner = _quad(integrand, t, S, qc, (1.0 - qc.cutoff_margin) * qc.abs_tol / ut)
    return ut * inner


def eval_v_prime(s: SeriesSolution, t: float, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """``v'(t) = -1/u(t) + u'(t) int_t^inf u^-2``."""
    ut = eval_u(s, t)
    return -1.0 / ut + eval_u_prime(s, t) * eval_v(s, t, qc) / ut


@lru_cache(maxsize=512)
def eval_G(omega: float, qc: QuadratureConfig = DEFAULT_QC) -> float:
    """``G(omega) = int_0^inf u(s, omega)^-2 ds``."""
    return eval_v(build_series(_check_omega(omega)), 0.0, qc)


def alpha_A(qc: QuadratureConfig = DEFAULT_QC) -> float:
    """Half-line threshold angle ``arctan G(0)``."""
    return math.atan(eval_G(0.0, qc))


def alpha_B(qc: QuadratureConfig = DEFAULT_QC) -> float:
    """Threshold angle ``arctan(G(0)/sqrt 2)`` of the continuous-at-0 family."""
    return math.atan(eval_G(0.0, qc) / math.sqrt(2.0))


class VTable:
    """Vectorized ``v(t, omega)`` and ``v'(t, omega)`` on ``[0, t_max]``.

    Independent of :func:`eval_v`: the tail integral is accumulated from the
    right with a composite 12-point Gauss-Legendre rule on cells of width
    ``1/cells_per_unit``, then finished inside the cell containing ``t``.
    """

    def __init__(self, omega: float, t_max: float = 12.0, cells_per_unit: int = 16):
        self.t_max = float(t_max)
        t_end = self.t_max + 2.0
        omega = _check_omega(omega)
        # certification needs roughly e * t^2 terms at the far end
        self.series = build_series(omega, max(DEFAULT_TERMS, certification_index(omega) + 2, int(3 * t_end**2) + 64))
        ncell = int(math.ceil(t_end * cells_per_unit))
        self.edges = np.linspace(0.0, t_end, ncell + 1)
        a, b = self.edges[:-1], self.edges[1:]
        half = 0.5 * (b - a)
        nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES
        vals = eval_u(self.series, nodes.ravel()).reshape(nodes.shape) ** -2
        cell = half * (vals @ _GL_WEIGHTS)
        tail = tail_bound(self.series.omega, t_end)
        # I(edge_k) = sum_{j >= k} cell_j (+ discarded tail below ``tail``)
        self.edge_integrals = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])
        self.discarded_tail = tail

    def integral(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.edges) - 2)
        right = self.edges[k + 1]
        half = 0.5 * (right - t)
        nodes = (0.5 * (right + t))[..., None] + half[..., None] * _GL_NODES
        vals = eval_u(self.series, nodes.ravel()).reshape(nodes.shape) ** -2
        return self.edge_integrals[k + 1] + half * (vals @ _GL_WEIGHTS)

    def __call__(self, t):
        """Return ``(v, v')`` at nonnegative ``t``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise ValueError(f"t outside [0, {self.t_max}]")
        flat = t.ravel()
        u = eval_u(self.series, flat)
        du = eval_u_prime(self.series, flat)
        inner = self.integral(flat)
        v = u * inner
        dv = -1.0 / u + du * inner
        return v.reshape(t.shape), dv.reshape(t.shape)
