"""Discrete Hölder semi-norm of a window over a grid of exponents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataError

# Floor added before taking logs so exact zeros in a curve stay finite.
EPS_FLOOR = np.finfo(np.float64).tiny
# Log-increments within this relative distance of the largest one count as ties.
JUMP_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class BetaGrid:
    """Exponents beta_k = k/n, k = 1..n."""

    n: int = 100

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DataError(f"grid resolution must be a positive integer, got {self.n}")

    @property
    def betas(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=np.float64) / self.n

    @property
    def step(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class Window:
    values: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise DataError("a window needs at least 2 points")
        if times.shape != values.shape:
            raise DataError(f"window has {values.size} values but {times.size} times")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(times))):
            raise DataError("window contains non-finite entries")
        if np.any(np.diff(times) <= 0):
            raise DataError("window times must be strictly increasing")
        if times[-1] - times[0] > 1.0:
            raise DataError("window time gaps must not exceed 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "times", times)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class SemiNormCurve:
    grid: BetaGrid
    c_values: np.ndarray

    @property
    def betas(self) -> np.ndarray:
        return self.grid.betas


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise DataError(f"beta must lie in (0, 1], got {beta}")
    return beta


def semi_norm(window: Window, beta: float) -> float:
    """max over pairs i != j of |X_i - X_j| / |t_i - t_j|**beta."""
    beta = _check_beta(beta)
    return float(_kernels.curve(window.values, window.times, np.array([beta]))[0])


def semi_norm_curve(window: Window, grid: BetaGrid = BetaGrid()) -> SemiNormCurve:
    c = _kernels.curve(window.values, window.times, grid.betas)
    return SemiNormCurve(grid, np.asarray(c, dtype=np.float64))


def estimate_holder_by_jump(curve: SemiNormCurve) -> float:
    """Exponent at the sharpest jump of the semi-norm curve.

    Takes the largest increment of ``log(C + EPS_FLOOR)`` between consecutive
    grid points and returns the beta at the upper end of that step.  Increments
    equal to the largest one up to ``JUMP_TIE_RTOL`` are ties, resolved toward
    the smaller k.  Once a single pair dominates the maximum, the log-curve is
    linear in beta and its increments agree to rounding; the tie rule then
    picks the first step of that regime.
    """
    c = np.asarray(curve.c_values, dtype=np.float64)
    if c.size < 3:
        raise DataError("jump detection needs at least 3 grid points")
    if not np.any(c > 0):
        raise DataError("semi-norm curve is identically zero: no regularity information")
    inc = np.diff(np.log(c + EPS_FLOOR))
    top = inc.max()
    k = int(np.flatnonzero(inc >= top - JUMP_TIE_RTOL * abs(top))[0])
    return float(curve.betas[k + 1])
