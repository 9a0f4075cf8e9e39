"""Selfadjoint boundary conditions at the origin and their Krein-space structure.

Families
--------
* ``HalfLine(side, theta)``: ``cos(theta) f(+-0) = sin(theta) f'(+-0)`` on one half-line.
* ``BTheta(theta)``: ``f`` continuous at 0 and
  ``sqrt(2) cos(theta) f(0) + sin(theta) [f'(-0) - f'(+0)] = 0``.
* ``CK(phi, alpha, beta1, beta2)``: the two coupled conditions attached to the
  unitary matrix ``K(phi, alpha, beta1, beta2)``.

Each family is a maximal neutral subspace of ``C^2``, ``C^3`` or ``C^4`` with
the Hermitian form coming from the Lagrange identity;
:func:`neutral_subspace_check` verifies that directly.

Note on the classical oscillator inside ``CK``: with the conditions used here,
continuity of ``f`` and ``f'`` corresponds to ``K = i [[0, 1], [1, 0]]``
(``phi = pi/2``, ``alpha = beta1 = beta2 = 0``), which is also the ``alpha -> 0``
limit of both the delta and delta-prime families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import BoundaryData

SQRT2 = math.sqrt(2.0)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta < math.pi:
        raise ValueError(f"theta={theta} must lie in [0, pi)")
    return theta


@dataclass(frozen=True)
class HalfLine:
    side: str  # "plus" | "minus"
    theta: float

    def __post_init__(self):
        if self.side not in ("plus", "minus"):
            raise ValueError("side must be 'plus' or 'minus'")
        object.__setattr__(self, "theta", _check_theta(self.theta))

    @property
    def family(self) -> str:
        return f"halfline-{self.side}"


@dataclass(frozen=True)
class BTheta:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_theta(self.theta))

    family = "btheta"


@dataclass(frozen=True)
class CK:
    phi: float
    alpha: float
    beta1: float = 0.0
    beta2: float = 0.0

    family = "ck"

    @property
    def matrix(self) -> np.ndarray:
        return k_matrix(self.phi, self.alpha, self.beta1, self.beta2)


Extension = Union[HalfLine, BTheta, CK]


def HalfLinePlus(theta: float) -> HalfLine:
    return HalfLine("plus", theta)


def HalfLineMinus(theta: float) -> HalfLine:
    return HalfLine("minus", theta)


def k_matrix(phi: float, alpha: float, beta1: float = 0.0, beta2: float = 0.0) -> np.ndarray:
    s, c = math.sin(alpha), math.cos(alpha)
    return np.exp(1j * phi) * np.array(
        [
            [np.exp(1j * beta1) * s, np.exp(-1j * beta2) * c],
            [np.exp(1j * beta2) * c, -np.exp(-1j * beta1) * s],
        ]
    )


def ck_rows(K: np.ndarray) -> np.ndarray:
    """The 2x4 condition matrix acting on ``(f(-0), f'(-0), f(+0), f'(+0))``."""
    k11, k12, k21, k22 = K[0, 0], K[0, 1], K[1, 0], K[1, 1]
    return np.array(
        [
            [1 - k11, 1j * (1 + k11), 1j * k12, -k12],
            [-k21, 1j * k21, 1j * (1 + k22), 1 - k22],
        ],
        dtype=complex,
    )


# --- indefinite forms ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IndefiniteForm:
    dimension: int
    gram: np.ndarray

    def __call__(self, x, y) -> complex:
        """``[x, y] = <G x, y>`` (linear in x, antilinear in y)."""
        return complex(np.vdot(np.asarray(y), self.gram @ np.asarray(x)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gram)

    def max_neutral_dimension(self, tol: float = 1e-12) -> int:
        ev = self.eigenvalues()
        pos, neg = int(np.sum(ev > tol)), int(np.sum(ev < -tol))
        return len(ev) - max(pos, neg)


HALFLINE_FORM = IndefiniteForm(2, np.array([[0, -1j], [1j, 0]]))
BTHETA_FORM = IndefiniteForm(3, np.array([[0, -1j, 1j], [1j, 0, 0], [-1j, 0, 0]]))
CK_FORM = IndefiniteForm(4, np.array([[0, -1j, 0, 0], [1j, 0, 0, 0], [0, 0, 0, 1j], [0, 0, -1j, 0]]))


def condition_rows(ext: Extension) -> np.ndarray:
    """Rows ``R`` with ``R x = 0`` describing the extension in its own coordinates.

    Coordinates: ``(f, f')`` at the relevant side for ``HalfLine``,
    ``(f(0), f'(-0), f'(+0))`` for ``BTheta``, the full traces for ``CK``.
    """
    if isinstance(ext, HalfLine):
        return np.array([[math.cos(ext.theta), -math.sin(ext.theta)]], dtype=complex)
    if isinstance(ext, BTheta):
        c, s = math.cos(ext.theta), math.sin(ext.theta)
        return np.array([[SQRT2 * c, s, -s]], dtype=complex)
    if isinstance(ext, CK):
        return ck_rows(ext.matrix)
    raise TypeError(f"not an extension: {ext!r}")


def _form_for(ext: Extension) -> IndefiniteForm:
    return {HalfLine: HALFLINE_FORM, BTheta: BTHETA_FORM, CK: CK_FORM}[type(ext)]


# --- operations -----------------------------------------------------------------


def boundary_residual(ext: Extension, b: BoundaryData) -> float:
    """Norm of the boundary-condition defect, relative to ``max(1, |b|)``.

    Only the relevant side enters for ``HalfLine``; for ``BTheta`` the
    continuity defect ``|f(+0) - f(-0)|`` is part of the residual.
    """
    if isinstance(ext, HalfLine):
        x = np.array([b.f_plus, b.df_plus] if ext.side == "plus" else [b.f_minus, b.df_minus])
        scale = max(1.0, float(np.linalg.norm(x)))
        return float(abs(condition_rows(ext)[0] @ x)) / scale
    scale = max(1.0, b.norm())
    if isinstance(ext, BTheta):
        f0 = 0.5 * (b.f_minus + b.f_plus)
        x = np.array([f0, b.df_minus, b.df_plus])
        defect = np.array([b.f_plus - b.f_minus, condition_rows(ext)[0] @ x])
        return float(np.linalg.norm(defect)) / scale
    if isinstance(ext, CK):
        return float(np.linalg.norm(condition_rows(ext) @ b.as_array())) / scale
    raise TypeError(f"not an extension: {ext!r}")


def ck_from_special(case: str, alpha: float | None = None) -> CK:
    """``CK`` parameters of the classical, delta(alpha) and delta-prime(alpha) cases."""
    if case == "classical":
        return CK(math.pi / 2, 0.0, 0.0, 0.0)
    if alpha is None or not 0.0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    if case == "delta":
        return CK(alpha + math.pi / 2, alpha, 0.0, 0.0)
    if case in ("delta_prime", "delta-prime"):
        return CK(math.pi / 2 - alpha, alpha, 0.0, 0.0)
    raise ValueError(f"unknown special case {case!r}")


class _Dirichlet:
    """Coupling value of ``theta = 0`` (infinite delta strength)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "DIRICHLET"


DIRICHLET = _Dirichlet()


def coupling_from_btheta(theta: float):
    """Delta strength ``c = cot(theta)/sqrt(2)``; ``DIRICHLET`` at ``theta = 0``."""
    theta = _check_theta(theta)
    if theta == 0.0:
        return DIRICHLET
    return math.cos(theta) / math.sin(theta) / SQRT2


def btheta_from_coupling(c) -> BTheta:
    if c is DIRICHLET:
        return BTheta(0.0)
    c = float(c)
    if math.isinf(c):
        if c > 0:
            return BTheta(0.0)
        raise ValueError("c = -inf has no extension (theta -> pi is open)")
    return BTheta(math.atan2(1.0, SQRT2 * c))


def btheta_from_delta(alpha: float) -> BTheta:
    """The ``BTheta`` with ``cot(theta) = -sqrt(2) tan(alpha)``, alpha != pi/2."""
    if abs(math.cos(alpha)) < 1e-15:
        raise ValueError("alpha = pi/2 is the decoupled Dirichlet case")
    return BTheta(math.atan2(1.0, -SQRT2 * math.tan(alpha)) % math.pi)


def symmetry_map(theta: float, side: str) -> tuple[float, str]:
    """Reflection ``t -> -t``: ``(theta, plus) -> (pi - theta, minus)``, ``theta = 0`` fixed."""
    theta = _check_theta(theta)
    other = {"plus": "minus", "minus": "plus"}[side]
    image = math.pi - theta
    # theta only matters mod pi: pi - (tiny) rounding to pi is the Dirichlet angle 0
    return (0.0 if theta == 0.0 or image >= math.pi else image), other


@dataclass
class NeutralityReport:
    ok: bool
    dimension: int
    expected_dimension: int
    max_form_value: float
    offending_pair: tuple | None = None
    basis: np.ndarray | None = None

    def __bool__(self):
        return self.ok


def _null_space(rows: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    _, s, vh = np.linalg.svd(rows)
    rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
    return vh[rank:].conj().T


def neutral_subspace_check(ext, tol: float = 1e-10) -> NeutralityReport:
    """Check that the extension's boundary space is a maximal neutral subspace.

    ``ext`` may also be a raw 2x2 complex matrix, read as the ``K`` of the
    coupled family (no unitarity assumed).
    """
    if isinstance(ext, np.ndarray):
        rows, form = ck_rows(np.asarray(ext, dtype=complex)), CK_FORM
    else:
        rows, form = condition_rows(ext), _form_for(ext)
    basis = _null_space(rows)
    dim = basis.shape[1]
    expected = form.max_neutral_dimension()
    worst, pair = 0.0, None
    for i in range(dim):
        for j in range(dim):
            val = abs(form(basis[:, i], basis[:, j]))
            if val > worst:
                worst = val
                if val > tol:
                    pair = (basis[:, i], basis[:, j])
    ok = dim == expected and worst <= tol
    return NeutralityReport(ok, dim, expected, worst, pair if not ok else None, basis)


# --- plain-text serialization (CLI) ---------------------------------------------

_FAMILIES = ("halfline-plus", "halfline-minus", "btheta", "ck")


def to_text(ext: Extension) -> str:
    if isinstance(ext, HalfLine):
        return f"family={ext.family} theta={ext.theta!r}"
    if isinstance(ext, BTheta):
        return f"family=btheta theta={ext.theta!r}"
    return f"family=ck phi={ext.phi!r} alpha={ext.alpha!r} beta1={ext.beta1!r} beta2={ext.beta2!r}"


def from_params(family: str, **params) -> Extension:
    family = family.lower()
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(_FAMILIES)}")
    if family == "ck":
        missing = [k for k in ("phi", "alpha") if params.get(k) is None]
        if missing:
            raise ValueError(f"family=ck needs {', '.join(missing)}")
        return CK(
            float(params["phi"]),
            float(params["alpha"]),
            float(params.get("beta1") or 0.0),
            float(params.get("beta2") or 0.0),
        )
    if params.get("theta") is None:
        raise ValueError(f"family={family} needs theta")
    if family == "btheta":
        return BTheta(float(params["theta"]))
    return HalfLine(family.split("-")[1], float(params["theta"]))


def from_text(text: str) -> Extension:
    """Parse ``family=btheta theta=1.2`` style descriptors."""
    params = {}
    for tok in text.replace(",", " ").split():
        if "=" not in tok:
            raise ValueError(f"malformed token {tok!r} (expected key=value)")
        k, v = tok.split("=", 1)
        params[k.strip().lower()] = v.strip()
    if "family" not in params:
        raise ValueError("descriptor lacks family=...")
    return from_params(params.pop("family"), **params)
