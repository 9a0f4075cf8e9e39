"""Independent reference values, derived from parabolic-cylinder functions.

The decaying solution of ``y'' = (t^2 - 2 lam) y`` on t > 0 is ``U(-lam, sqrt(2) t)``,
whose values at 0 are known in closed form.  Nothing here calls the library.
"""
import math

import numpy as np
from scipy import special


def log_derivative_at_zero(lam):
    """``y'(0)/y(0)`` of the L2 solution on t > 0."""
    lam = np.asarray(lam, dtype=float)
    return -2.0 * special.rgamma(0.25 - lam / 2) / special.rgamma(0.75 - lam / 2)


def boundary_direction(lam):
    """Unit ``(y(0), y'(0))``, finite at the poles of the log-derivative."""
    a, b = special.rgamma(0.75 - lam / 2), -2.0 * special.rgamma(0.25 - lam / 2)
    n = math.hypot(a, b)
    return a / n, b / n


def G(omega):
    a = omega * omega / 2
    return 0.5 * math.exp(special.gammaln(0.25 + a) - special.gammaln(0.75 + a))


def btheta_even_eigenvalues(theta, lo, hi, n=20001):
    """Roots of ``sqrt(2) cos(theta) y(0) - 2 sin(theta) y'(0)`` by dense sampling + brentq."""
    from scipy.optimize import brentq

    def f(lam):
        y, dy = boundary_direction(lam)
        return math.sqrt(2) * math.cos(theta) * y - 2 * math.sin(theta) * dy

    xs = np.linspace(lo, hi, n)
    vs = [f(x) for x in xs]
    return [brentq(f, a, b, xtol=1e-14) for a, b, fa, fb in zip(xs, xs[1:], vs, vs[1:]) if fa * fb < 0]
