"""Selfadjoint extensions of the harmonic oscillator restricted at the origin."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyBudgetError,
    IntegrationError,
    OscillatorError,
    QuadratureError,
    SeriesBudgetError,
)
from .extensions import CK, BTheta, HalfLine, HalfLineMinus, HalfLinePlus  # noqa: E402
from .grid import BoundaryData, GridFunction  # noqa: E402
from .series import QuadratureConfig, alpha_A, alpha_B, eval_G  # noqa: E402
from .spectrum import EigenResult, eigenvalues_in, negative_eigenvalue, secular  # noqa: E402

__all__ = [
    "AccuracyBudgetError",
    "BTheta",
    "BoundaryData",
    "CK",
    "EigenResult",
    "GridFunction",
    "HalfLine",
    "HalfLineMinus",
    "HalfLinePlus",
    "IntegrationError",
    "OscillatorError",
    "QuadratureConfig",
    "QuadratureError",
    "SeriesBudgetError",
    "alpha_A",
    "alpha_B",
    "eigenvalues_in",
    "eval_G",
    "negative_eigenvalue",
    "secular",
]
