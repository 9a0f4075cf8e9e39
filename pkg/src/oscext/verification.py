"""Named invariants of every module, run by ``oscext verify``.

Each check returns a nonnegative residual; it passes when the residual does
not exceed its threshold.  Property checks (orderings, counts) report the size
of the violation, or 1.0 / 0.0.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import distributions as D
from . import extensions as E
from . import hermite as H
from . import ode
from . import series as S
from . import spectrum as SP
from .grid import BoundaryData, default_grid, from_evaluator

MODULES = ("series", "hermite", "ode", "extensions", "spectrum", "distributions")


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    run: Callable[[], float]
    threshold: float


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    residual: float
    threshold: float
    passed: bool
    seconds: float
    error: Optional[str] = None


REGISTRY: list[Check] = []


def check(module: str, threshold: float):
    def deco(fn):
        REGISTRY.append(Check(module, fn.__name__, fn, threshold))
        return fn

    return deco


def _violation(ok: bool) -> float:
    return 0.0 if ok else 1.0


def _richardson_d2(f, t, h=1e-2):
    """Second derivative by central differences with one Richardson step."""
    d = lambda k: (f(t + k) - 2.0 * f(t) + f(t - k)) / (k * k)
    return (4.0 * d(h / 2) - d(h)) / 3.0


def _richardson_d1(f, t, h=1e-3):
    d = lambda k: (f(t + k) - f(t - k)) / (2.0 * k)
    return (4.0 * d(h / 2) - d(h)) / 3.0


# --- series -------------------------------------------------------------------------


@check("series", 1e-13)
def recursion_consistency():
    worst = 0.0
    for w in (0.0, 1.0, 2.5):
        a = S.build_series(w, 256).coeffs
        b = S.build_series(w, 512).coeffs[:256]
        nz = a > 0
        worst = max(worst, float(np.max(np.abs(a[nz] - b[nz]) / a[nz])))
    return worst


@check("series", 0.0)
def sandwich_u0():
    t = np.linspace(3.0 / 50, 3.0, 50)
    u = S.eval_u(S.build_series(0.0), t)
    return float(max(0.0, np.max(np.cosh(t * t / 3) - u), np.max(u - np.cosh(t * t / 2))))


@check("series", 0.0)
def u_below_q_exp():
    worst = 0.0
    t = np.linspace(0.0, 6.0, 121)
    for w in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0):
        s = S.build_series(w)
        u = S.eval_u(s, t)
        worst = max(worst, float(np.max(np.log(u) - s.log_q - t * t)))
    return max(worst, 0.0)


@check("series", 0.0)
def G_decreasing():
    g = [S.eval_G(w) for w in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]
    return _violation(all(a > b for a, b in zip(g, g[1:])))


@check("series", 1e-8)
def u_ode_residual():
    worst = 0.0
    t = np.linspace(0.1, 3.0, 30)
    for w in (0.0, 1.0, 2.0):
        s = S.build_series(w)
        f = lambda x: S.eval_u(s, x)
        u = f(t)
        res = -0.5 * _richardson_d2(f, t, 2e-3) + 0.5 * t * t * u + w * w * u
        worst = max(worst, float(np.max(np.abs(res) / np.maximum(1.0, u))))
    return worst


@check("series", 1e-6)
def v_ode_residual_and_slope():
    worst = 0.0
    for w in (0.0, 1.0):
        s = S.build_series(w)
        f = lambda x: np.array([S.eval_v(s, float(y)) for y in np.atleast_1d(x)])
        t = np.linspace(0.2, 2.0, 10)
        v = f(t)
        res = -0.5 * _richardson_d2(f, t) + 0.5 * t * t * v + w * w * v
        worst = max(worst, float(np.max(np.abs(res))))
        slope = (S.eval_v(s, 1e-4) - S.eval_v(s, 0.0)) / 1e-4
        worst = max(worst, abs(slope + 1.0) - 1e-4)
    return max(worst, 0.0)


@check("series", 0.0)
def G0_between_cosh_bounds():
    lo = integrate.quad(lambda s: math.cosh(s * s / 2) ** -2, 0, 12, epsabs=1e-14, limit=200)[0]
    hi = integrate.quad(lambda s: math.cosh(s * s / 3) ** -2, 0, 12, epsabs=1e-14, limit=200)[0]
    return _violation(lo < S.eval_G(0.0) < hi)


# --- hermite ------------------------------------------------------------------------


@check("hermite", 1e-8)
def orthonormality():
    x, w = D._gl_rule(16)
    table = H._psi_table(9, x)
    gram = (table * w) @ table.T
    return float(np.max(np.abs(gram - np.eye(10))))


@check("hermite", 1e-6)
def eigen_relation_fd():
    t = np.linspace(-4, 4, 81)
    worst = 0.0
    for n in range(8):
        p = H.psi(n)
        res = -0.5 * _richardson_d2(p, t) + 0.5 * t * t * p(t) - p.eigenvalue * p(t)
        worst = max(worst, float(np.max(np.abs(res))) / float(np.max(np.abs(p(t)))))
    return worst


@check("hermite", 0.0)
def parity_table():
    bad = 0
    for n in range(11):
        p = H.psi(n)
        v, d = float(p(0.0)), float(p.derivative(0.0))
        if n % 2 == 0:
            bad += not (abs(v) > 1e-3 and abs(d) < 1e-14)
        else:
            bad += not (abs(v) < 1e-14 and abs(d) > 1e-3)
    return float(bad)


@check("hermite", 1e-3)
def halfline_completeness():
    """1 - captured fraction of a random odd function on t > 0 by psi_{2n+1}, n <= 20."""
    rng = np.random.default_rng(7)
    x, w = D._gl_rule(16)
    pos = x > 0
    x, w = x[pos], w[pos]
    worst = 0.0
    for _ in range(5):
        c = rng.uniform(-1, 1, 3)
        a = rng.uniform(0.7, 1.4)
        f = x * np.polynomial.polynomial.polyval(x * x, c) * np.exp(-0.5 * a * x * x)
        table = H._psi_table(41, x)[1::2] * math.sqrt(2.0)  # orthonormal on (0, inf)
        coef = (table * w) @ f
        worst = max(worst, 1.0 - float(coef @ coef) / float((f * f) @ w))
    return worst


@check("hermite", 1e-8)
def lowering_kills_psi0():
    f = H.ladder_lower(H.psi(0).grid_function(), 0.5)
    return f.sup_norm()


@check("hermite", 1e-8)
def ladder_u2_continuous():
    u2 = H.ladder_eigenfunction(2)
    b = u2.boundary
    jump_v = abs(b.value_jump) / u2.sup_norm()
    return jump_v if abs(b.derivative_jump) > 1e-3 else 1.0


@check("hermite", 1e-12)
def phi_sum_identity():
    t = np.array([-1.0, 0.0, 2.0])
    return float(np.max(np.abs(H.phi_plus(t) + H.phi_minus(t) - math.sqrt(math.pi) * H.phi_one(t))))


# --- ode ----------------------------------------------------------------------------


@check("ode", 1e-8)
def projective_stability():
    worst = 0.0
    for lam in (-2.0, 0.0, 0.7, 3.3):
        a = ode.build_l2_solution(lam, tol=1e-11)
        b = ode.build_l2_solution(lam, tol=1e-11, start_T=1.25 * a.start_T)
        worst = max(worst, ode.projective_distance(a.direction, b.direction))
    return worst


@check("ode", 1e-6)
def series_cross_validation():
    worst = 0.0
    for w in (0.25, 0.5, 1.0, 2.0):
        y = ode.build_l2_solution(-w * w, tol=1e-11)
        worst = max(worst, abs(y.dvalue0 / y.value0 * S.eval_G(w) + 1.0))
    return worst


@check("ode", 0.0)
def one_dimensional_directions():
    lams = np.linspace(-10, 10, 81)
    y, dy = ode.boundary_directions(lams, 1e-10)
    return _violation(bool(np.all(np.hypot(y, dy) > 1e-8)))


@check("ode", 1e-7)
def samples_match_oracles():
    """Tabulated L2 solutions against v(., omega) and psi_0, psi_2 (relative to sup)."""
    grid = np.linspace(0.05, 5.0, 100)
    cases = [(-1.0, lambda t: np.array([S.eval_v(S.build_series(1.0), x) for x in t])), (0.5, H.psi(0)), (2.5, H.psi(2))]
    worst = 0.0
    for lam, ref in cases:
        y = ode.build_l2_solution(lam, tol=1e-12, grid=grid).samples
        r = ref(y.grid)
        c = float(r @ y.values) / float(y.values @ y.values)
        worst = max(worst, float(np.max(np.abs(c * y.values - r)) / np.max(np.abs(r))))
    return worst


# --- extensions ---------------------------------------------------------------------


def _random_extensions(rng, n):
    out = []
    for _ in range(n):
        out.append(E.HalfLine("plus", rng.uniform(0, math.pi)))
        out.append(E.HalfLine("minus", rng.uniform(0, math.pi)))
        out.append(E.BTheta(rng.uniform(0, math.pi)))
        out.append(E.CK(*rng.uniform(0, 2 * math.pi, 4)))
    return out


@check("extensions", 1e-10)
def neutrality_random():
    rng = np.random.default_rng(11)
    worst = 0.0
    for ext in _random_extensions(rng, 100):
        r = E.neutral_subspace_check(ext)
        worst = max(worst, r.max_form_value if r.ok else 1.0)
    return worst


@check("extensions", 1e-12)
def k_unitary():
    rng = np.random.default_rng(12)
    worst = 0.0
    for p in rng.uniform(0, 2 * math.pi, (100, 4)):
        K = E.k_matrix(*p)
        worst = max(worst, float(np.linalg.norm(K.conj().T @ K - np.eye(2))))
    return worst


@check("extensions", 0.0)
def nonunitary_detected():
    K = E.k_matrix(0.3, 0.4, 0.5, 0.6)
    K[0, 0] *= 1.1
    return _violation(not E.neutral_subspace_check(K).ok)


@check("extensions", 1e-12)
def delta_case_equivalence():
    """delta(alpha) conditions vs continuity + derivative jump, both directions."""
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(0.05, math.pi - 0.05)
        if abs(a - math.pi / 2) < 0.05:
            continue
        ext = E.ck_from_special("delta", a)
        f0, dm = rng.normal(size=2)
        b = BoundaryData(f0, dm, f0, dm - 2 * math.tan(a) * f0)
        worst = max(worst, E.boundary_residual(ext, b))
        # a basis of the CK solution space satisfies the explicit form
        for v in E._null_space(E.ck_rows(ext.matrix)).T:
            fm, dfm, fp, dfp = v
            worst = max(worst, abs(fm - fp) + abs((dfm - dfp) - 2 * math.tan(a) * fp))
        worst = max(worst, E.boundary_residual(E.btheta_from_delta(a), b))
    return worst


@check("extensions", 1e-12)
def delta_prime_case_equivalence():
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(0.05, math.pi - 0.05)
        if abs(a - math.pi / 2) < 0.05:
            continue
        ext = E.ck_from_special("delta_prime", a)
        fm, d = rng.normal(size=2)
        b = BoundaryData(fm, d, fm - 2 * math.tan(a) * d, d)
        worst = max(worst, E.boundary_residual(ext, b))
    return worst


@check("extensions", 1e-12)
def coupling_round_trip():
    worst = 0.0
    for th in np.linspace(0.05, math.pi - 0.05, 40):
        worst = max(worst, abs(E.btheta_from_coupling(E.coupling_from_btheta(th)).theta - th))
    return worst


# --- spectrum -----------------------------------------------------------------------


@check("spectrum", 1e-6)
def exactly_one_btheta():
    lams = np.linspace(-4, 8, 49)
    th = SP.btheta_angle(lams)
    worst = 0.0
    for lam, t in zip(lams, th):
        s = SP.secular(E.BTheta(float(t)), float(lam))
        worst = max(worst, abs(s.factors[1]))
    # continuity of theta(lam) modulo pi on a fine grid
    fine = SP.btheta_angle(np.linspace(-4, 8, 1201))
    d = np.abs(np.diff(fine))
    jumps = np.minimum(d, math.pi - d)
    return worst if float(np.max(jumps)) < 0.1 else 1.0


@check("spectrum", 0.0)
def at_most_one_negative():
    rng = np.random.default_rng(15)
    lams = np.linspace(-50, -1e-3, 1000)
    y, dy = SP._unit_directions(lams, 1e-10)
    worst = 0
    for ext in _random_extensions(rng, 17)[:50]:
        if isinstance(ext, E.CK):
            continue  # two decoupled half-lines can each carry one
        n = sum(len(SP._sign_brackets(lams, f)) for f in SP._factors(ext, y, dy)[1])
        worst = max(worst, n)
    return float(max(0, worst - 1))


@check("spectrum", 0.0)
def negative_eigenvalue_monotone():
    thr = math.pi - S.alpha_B()
    ths = thr + (math.pi - thr) * np.arange(1, 21) / 21
    lam = [SP.negative_eigenvalue(t).lam for t in ths]
    return _violation(all(a > b for a, b in zip(lam, lam[1:])) and lam[-1] < -25)


@check("spectrum", 0.0)
def even_shift_with_coupling():
    def lowest_even(c):
        ext = E.btheta_from_coupling(c)
        return min(r.lam for r in SP.eigenvalues_in(ext, -5, 3.4) if "even" in (r.channel or ""))

    up = [lowest_even(c) for c in (0.0, 0.5, 1.0, 2.0)]
    down = [lowest_even(c) for c in (0.0, -0.2, -0.4)]
    return _violation(all(a < b for a, b in zip(up, up[1:])) and all(a > b for a, b in zip(down, down[1:])))


@check("spectrum", 1e-6)
def cross_method_agreement():
    worst = 0.0
    for w in (0.5, 1.0, 2.0):
        th = math.pi - math.atan(S.eval_G(w) / math.sqrt(2.0))
        g = SP.negative_eigenvalue(th).lam
        r = SP.eigenvalues_in(E.BTheta(th), -w * w - 0.5, -w * w + 0.5)
        sec = r[0].lam if len(r) == 1 else math.inf
        worst = max(worst, abs(g - sec), abs(g + w * w))
    return worst


@check("spectrum", 1e-6)
def halfline_symmetry():
    worst = 0.0
    for th in (0.3, 1.2):
        a = SP.negative_eigenvalue_halfline(th, "minus")
        b = SP.negative_eigenvalue_halfline(math.pi - th, "plus")
        ra = SP.eigenvalues_in(E.HalfLine("minus", th), -6, 4)
        rb = SP.eigenvalues_in(E.HalfLine("plus", math.pi - th), -6, 4)
        if (a is None) != (b is None) or len(ra) != len(rb):
            return 1.0
        if a is not None:
            worst = max(worst, abs(a.lam - b.lam))
        worst = max(worst, max(abs(x.lam - y.lam) for x, y in zip(ra, rb)))
    return worst


@check("spectrum", 1e-6)
def form_equals_twice_energy():
    P = np.polynomial.Polynomial
    p = P([-1.0, 1.0]) ** 4 * P([4.0, -1.0]) ** 4  # (t-1)^4 (4-t)^4, C^3 once cut off
    dp, d2p = p.deriv(), p.deriv(2)

    def ev(t):
        t = np.asarray(t, dtype=float)
        inside = (t > 1) & (t < 4)
        return tuple(np.where(inside, q(t), 0.0) for q in (p, dp, d2p))

    f = from_evaluator(ev, default_grid(6.0, 1 / 256))
    form = SP.form_positivity(f, "plus")
    energy = integrate.quad(lambda t: p(t) * (-0.5 * d2p(t) + 0.5 * t * t * p(t)), 1, 4, epsabs=0, epsrel=1e-13)[0]
    return abs(form - 2 * energy) / form


# --- distributions ------------------------------------------------------------------


@check("distributions", 1e-6)
def delta_identities():
    worst = 0.0
    for f in D.test_suite():
        for got, want in ((D.delta_functional(f), f.value0), (D.delta_prime_functional(f), f.dvalue0)):
            worst = max(worst, abs(got - want) / max(abs(want), f.plus_norm * 1e-3))
    return worst


@check("distributions", 1e-6)
def integration_by_parts():
    fs = D.random_test_functions()
    return max(max(D.integration_by_parts_defect(f, 1), D.integration_by_parts_defect(f, 2)) for f in fs)


@check("distributions", 1e-8)
def delta_linear():
    fs = D.random_test_functions(4)
    a, b = 0.7, -1.3
    f, g = fs[0], fs[1]

    def ev(t):
        x, y = f.evaluator(t), g.evaluator(t)
        return tuple(a * p + b * q for p, q in zip(x, y))

    h = D.make_test_function("combo", ev)
    return abs(D.delta_functional(h) - a * D.delta_functional(f) - b * D.delta_functional(g))


@check("distributions", 1e-8)
def boundedness():
    bound = 0.5 * D.w_norm(1)
    return max(0.0, max(D.boundedness_ratio(f) for f in D.test_suite()) - bound)


@check("distributions", 1e-6)
def perturbation_identity():
    fs = D.test_suite()[:8]
    few = np.array([-1.0, 1.0])  # the identity uses the evaluators; samples are not needed
    gs = [D.w_function(1, few), D.w_function(2, few), H.psi(3).grid_function(few)]
    return max(D.perturbation_identity_check(g, f) for g in gs for f in fs)


# --- runner -------------------------------------------------------------------------


def run_checks(only: Optional[str] = None, tol: Optional[float] = None) -> list[CheckResult]:
    """Run the registry, optionally restricted to one module.

    ``tol`` acts as a floor on every threshold (``--tol 1e-2`` loosens all of them).
    """
    if only is not None and only not in MODULES:
        raise ValueError(f"unknown module {only!r}; expected one of {', '.join(MODULES)}")
    return [run_check(c, tol) for c in REGISTRY if only is None or c.module == only]


def run_check(c: Check, tol: Optional[float] = None) -> CheckResult:
    thr = c.threshold if tol is None else max(c.threshold, tol)
    t0 = time.perf_counter()
    try:
        r = float(c.run())
        err = None
    except Exception as exc:  # a crashing invariant is a failing one
        r, err = math.inf, f"{type(exc).__name__}: {exc}"
    ok = err is None and r <= thr
    return CheckResult(c.module, c.name, r, thr, ok, time.perf_counter() - t0, err)
