"""Weierstrass-type functions with known Hölder regularity.

``weierstrass`` has uniform exponent 2 - D; ``generalized_weierstrass`` has
pointwise exponent s(t) for a prescribed profile s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError

# Profile values below this are flagged as near-singular sample points.
SINGULAR_FLAG_EPS = 1e-6


@dataclass(frozen=True)
class WeierstrassConfig:
    D: float = 1.5
    b: float = 2.0
    n_min: int = -20
    n_max: int = 40

    def __post_init__(self):
        if not 1.0 < self.D < 2.0:
            raise DataError(f"D must lie in (1, 2), got {self.D}")
        if not self.b > 1.0:
            raise DataError(f"b must exceed 1, got {self.b}")
        if self.n_min > self.n_max:
            raise DataError("n_min must not exceed n_max")
        if self.b ** 2 <= 2.0 ** (2.0 - self.D):
            raise DataError("lower tail of the sum does not converge for this (b, D)")

    @property
    def holder_exponent(self) -> float:
        return 2.0 - self.D


def weierstrass(t, config: WeierstrassConfig = WeierstrassConfig()):
    """Truncated sum over n_min..n_max of (1 - cos(b**n t)) / 2**((2 - D) n)."""
    t = np.asarray(t, dtype=np.float64)
    n = np.arange(config.n_min, config.n_max + 1, dtype=np.float64)
    freq = config.b ** n
    weight = 2.0 ** (-(2.0 - config.D) * n)
    terms = (1.0 - np.cos(np.multiply.outer(t, freq))) * weight
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def weierstrass_tail_bound(t, config: WeierstrassConfig = WeierstrassConfig()):
    """Bound on the terms the truncation drops, at each t.

    Upper tail: each term is at most 2 / 2**((2-D)n).  Lower tail: 1 - cos(x)
    is at most x**2 / 2, leaving a geometric series in b**2 / 2**(2-D).
    """
    t = np.asarray(t, dtype=np.float64)
    a = 2.0 - config.D
    upper = 2.0 * 2.0 ** (-a * (config.n_max + 1)) / (1.0 - 2.0 ** (-a))
    ratio = config.b ** 2 / 2.0 ** a
    lower = 0.5 * t ** 2 * ratio ** (config.n_min - 1) / (1.0 - 1.0 / ratio)
    return upper + lower


def abs_sin_profile(t):
    """s(t) = |sin(5 pi t)|."""
    return np.abs(np.sin(5.0 * np.pi * np.asarray(t, dtype=np.float64)))


@dataclass(frozen=True)
class GenWeierstrassConfig:
    s_function: Callable = abs_sin_profile
    k_max: int = 40
    domain: tuple[float, float] = field(default=(1.0, 2.0))

    def __post_init__(self):
        if self.k_max < 0:
            raise DataError("k_max must be nonnegative")
        if not self.domain[0] < self.domain[1]:
            raise DataError(f"empty domain {self.domain}")


def _profile(t: np.ndarray, config: GenWeierstrassConfig) -> np.ndarray:
    lo, hi = config.domain
    if np.any((t < lo) | (t > hi)):
        bad = t[(t < lo) | (t > hi)].flat[0]
        raise DataError(f"t = {bad} outside domain [{lo}, {hi}]")
    s = np.asarray(config.s_function(t), dtype=np.float64)
    if np.any(~(s > 0)):
        bad = t[~(s > 0)].flat[0]
        raise DataError(f"profile s(t) <= 0 at t = {bad}; the series does not converge there")
    return s


def generalized_weierstrass(t, config: GenWeierstrassConfig = GenWeierstrassConfig()):
    """Truncated sum over k = 0..k_max of 3**(-k s(t)) sin(3**k t)."""
    t_arr = np.asarray(t, dtype=np.float64)
    s = _profile(t_arr, config)
    k = np.arange(config.k_max + 1, dtype=np.float64)
    amp = 3.0 ** (-np.multiply.outer(s, k))
    terms = amp * np.sin(np.multiply.outer(t_arr, 3.0 ** k))
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def generalized_weierstrass_tail_bound(t, config: GenWeierstrassConfig = GenWeierstrassConfig()):
    """Geometric bound on the sum of |terms| for k > k_max."""
    s = _profile(np.asarray(t, dtype=np.float64), config)
    q = 3.0 ** (-s)
    return q ** (config.k_max + 1) / (1.0 - q)


@dataclass(frozen=True)
class GenWeierstrassSample:
    t: np.ndarray
    values: np.ndarray
    tail_bound: np.ndarray
    near_singular: np.ndarray  # profile below SINGULAR_FLAG_EPS


def sample_generalized_weierstrass(t, config: GenWeierstrassConfig = GenWeierstrassConfig()):
    t = np.asarray(t, dtype=np.float64)
    s = _profile(t, config)
    return GenWeierstrassSample(
        t=t,
        values=np.atleast_1d(generalized_weierstrass(t, config)),
        tail_bound=np.atleast_1d(generalized_weierstrass_tail_bound(t, config)),
        near_singular=np.atleast_1d(s < SINGULAR_FLAG_EPS),
    )


def theoretical_pointwise_exponent(t, config: GenWeierstrassConfig = GenWeierstrassConfig()):
    """The pointwise Hölder exponent of V at t, which is s(t)."""
    t_arr = np.asarray(t, dtype=np.float64)
    lo, hi = config.domain
    if np.any((t_arr < lo) | (t_arr > hi)):
        raise DataError(f"t outside domain [{lo}, {hi}]")
    s = np.asarray(config.s_function(t_arr), dtype=np.float64)
    return float(s) if s.ndim == 0 else s
