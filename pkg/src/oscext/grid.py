"""Boundary traces at the origin and piecewise tabulated functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# (t) -> (f, f', f''), vectorized, evaluated on a single side of 0.
Evaluator = Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class BoundaryData:
    """One-sided limits ``(f(-0), f'(-0), f(+0), f'(+0))``."""

    f_minus: complex
    df_minus: complex
    f_plus: complex
    df_plus: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.f_minus, self.df_minus, self.f_plus, self.df_plus], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "BoundaryData":
        a = np.asarray(arr)
        if a.shape != (4,):
            raise ValueError("boundary data needs exactly four traces")
        return cls(*(complex(x) for x in a))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @property
    def value_jump(self) -> complex:
        return self.f_plus - self.f_minus

    @property
    def derivative_jump(self) -> complex:
        return self.df_plus - self.df_minus


def default_grid(half_width: float = 12.0, step: float = 1.0 / 512) -> np.ndarray:
    """Uniform grid on ``[-half_width, half_width]`` with the origin removed."""
    n = int(round(half_width / step))
    pos = step * np.arange(1, n + 1)
    return np.concatenate([-pos[::-1], pos])


@dataclass(frozen=True)
class GridFunction:
    """Function sampled on a grid that excludes 0, with one-sided limits at 0.

    ``evaluator`` is optional exact access, ``evaluator(t) -> (f, f', f'')``,
    valid on both sides; quadrature routines prefer it over the samples.
    """

    grid: np.ndarray
    values: np.ndarray
    d_values: np.ndarray
    boundary: BoundaryData
    evaluator: Optional[Evaluator] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(g == 0.0):
            raise ValueError("grid must exclude the origin")
        if np.shape(self.values) != g.shape or np.shape(self.d_values) != g.shape:
            raise ValueError("values and d_values must match the grid")

    @property
    def minus(self) -> np.ndarray:
        return self.grid < 0

    @property
    def plus(self) -> np.ndarray:
        return self.grid > 0

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def side(self, sign: int):
        """Grid, values and derivatives of one side, with the limit at 0 prepended/appended."""
        b = self.boundary
        cast = complex if np.iscomplexobj(self.values) else (lambda z: z.real)
        b = BoundaryData(*(cast(z) for z in (b.f_minus, b.df_minus, b.f_plus, b.df_plus)))
        if sign > 0:
            m = self.plus
            t = np.concatenate([[0.0], self.grid[m]])
            f = np.concatenate([[b.f_plus], self.values[m]])
            df = np.concatenate([[b.df_plus], self.d_values[m]])
        else:
            m = self.minus
            t = np.concatenate([self.grid[m], [0.0]])
            f = np.concatenate([self.values[m], [b.f_minus]])
            df = np.concatenate([self.d_values[m], [b.df_minus]])
        return t, f, df

    def derivative_fd_defect(self) -> float:
        """Max mismatch between ``d_values`` and second-order differences of ``values``."""
        worst = 0.0
        for sign in (-1, 1):
            t, f, df = self.side(sign)
            if t.size < 3:
                continue
            fd = np.gradient(f, t, edge_order=2)
            worst = max(worst, float(np.max(np.abs(fd - df))))
        return worst


def from_evaluator(evaluator: Evaluator, grid: Optional[np.ndarray] = None) -> GridFunction:
    """Tabulate an exact piecewise evaluator on ``grid`` (default grid if omitted)."""
    g = default_grid() if grid is None else np.asarray(grid, dtype=float)
    f, df, _ = evaluator(g)
    # one-sided limits: evaluators tell the sides of 0 apart with np.signbit
    fm, dfm, _ = evaluator(np.array([-0.0]))
    fp, dfp, _ = evaluator(np.array([0.0]))
    boundary = BoundaryData(complex(fm[0]), complex(dfm[0]), complex(fp[0]), complex(dfp[0]))
    return GridFunction(g, np.asarray(f), np.asarray(df), boundary, evaluator)
