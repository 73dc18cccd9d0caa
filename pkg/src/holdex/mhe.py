"""Modified Hölder exponents of a target window and the pointwise MPHE series.

The modified exponent of a target window is the first grid exponent beta_k at
which the window's semi-norm C(beta_k) reaches a reference level.  The
reference level is the mean semi-norm, at a fixed exponent ``alpha_ref``, of
``n_blocks`` consecutive blocks of ``block_size`` points immediately preceding
the target window.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import DataError
from .seminorm import BetaGrid, Window
from .timeseries_io import TimeSeries

TRAILING = "trailing"
CENTERED = "centered"

# Sample spacing used for the MPHE time axis.  It is fixed rather than 1/N so
# that extending a series leaves earlier values untouched.
DEFAULT_TIME_STEP = 1e-3


@dataclass(frozen=True)
class ReferenceConfig:
    alpha_ref: float = 0.5
    block_size: int = 7
    n_blocks: int = 5

    def __post_init__(self):
        if not 0.0 < self.alpha_ref <= 1.0:
            raise DataError(f"alpha_ref must lie in (0, 1], got {self.alpha_ref}")
        if self.block_size < 2:
            raise DataError("block_size must be at least 2")
        if self.n_blocks < 1:
            raise DataError("n_blocks must be at least 1")

    @property
    def total(self) -> int:
        return self.block_size * self.n_blocks


@dataclass(frozen=True)
class MpheConfig:
    window_w: int = 30
    grid: BetaGrid = field(default_factory=BetaGrid)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    window_mode: str = TRAILING
    cap_value: float = 1.0
    time_step: float = DEFAULT_TIME_STEP

    def __post_init__(self):
        if self.window_w < 2:
            raise DataError("window_w must be at least 2")
        if self.window_mode not in (TRAILING, CENTERED):
            raise DataError(f"window_mode must be {TRAILING!r} or {CENTERED!r}")
        if self.window_mode == CENTERED and self.window_w % 2 == 0:
            raise DataError("centered windows need an odd window_w (7 in the reference protocol)")
        if not 0.0 < self.cap_value <= 1.0:
            raise DataError(f"cap_value must lie in (0, 1], got {self.cap_value}")
        span = max(self.window_w, self.reference.block_size) - 1
        if not self.time_step > 0 or span * self.time_step > 1.0:
            raise DataError(f"time_step {self.time_step} puts window gaps outside (0, 1]")

    @property
    def min_length(self) -> int:
        """Shortest series with at least one admissible evaluation point."""
        return self.window_w + self.reference.total

    def offsets(self) -> tuple[int, int]:
        """(first target index relative to t_k, first admissible k)."""
        if self.window_mode == TRAILING:
            lo = -(self.window_w - 1)
        else:
            lo = -(self.window_w // 2)
        return lo, self.reference.total - lo


@dataclass(frozen=True)
class MpheSeries:
    dates: np.ndarray
    g_values: np.ndarray
    config: MpheConfig
    normalized: bool = False
    index: np.ndarray | None = None  # positions in the parent series
    zero_reference: np.ndarray | None = None  # True where the reference level was 0

    def __len__(self):
        return self.g_values.size


def reference_level(history, times, ref: ReferenceConfig = ReferenceConfig()) -> float:
    """Mean block semi-norm at ``alpha_ref`` over the last ``ref.total`` history points."""
    history = np.ascontiguousarray(history, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if history.shape != times.shape:
        raise DataError("history and times differ in length")
    if history.size < ref.total:
        raise DataError(f"reference needs {ref.total} history points, got {history.size}")
    start = history.size - ref.total
    for j in range(ref.n_blocks):
        Window(history[start + j * ref.block_size:start + (j + 1) * ref.block_size],
               times[start + j * ref.block_size:start + (j + 1) * ref.block_size])
    return _kernels.reference(history, times, start, ref.block_size, ref.n_blocks, ref.alpha_ref)


def mhe(target: Window, c_ref: float, grid: BetaGrid = BetaGrid(), cap_value: float = 1.0) -> float:
    """Smallest beta_k with C(beta_k) >= c_ref, or ``cap_value`` if none reaches it."""
    if not c_ref >= 0:
        raise DataError(f"reference level must be nonnegative, got {c_ref}")
    betas = grid.betas
    k = _kernels.first_reach(target.values, target.times, betas, c_ref)
    return float(cap_value) if k < 0 else float(betas[k])


def mphe_values(values, times, config: MpheConfig = MpheConfig()) -> tuple[np.ndarray, np.ndarray]:
    """MPHE at every admissible index of a raw sample.

    Returns ``(index, g)``.  Times are used as given; they must be strictly
    increasing with every window spanning at most 1.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if values.shape != times.shape or values.ndim != 1:
        raise DataError("values and times must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(times))):
        raise DataError("non-finite entries in values or times")
    if np.any(np.diff(times) <= 0):
        raise DataError("times must be strictly increasing")
    lo, first = config.offsets()
    hi = config.window_w + lo - 1
    last = values.size - 1 - hi
    if last < first:
        raise DataError(f"series too short: {values.size} points, need at least "
                        f"{first + hi + 1} (window {config.window_w} + reference "
                        f"{config.reference.total})")
    span = np.max(times[config.window_w - 1:] - times[:values.size - config.window_w + 1])
    if span > 1.0:
        raise DataError("a target window spans more than 1 time unit")
    centers = np.arange(first, last + 1, dtype=np.int64)
    ref = config.reference
    g = _kernels.mphe(values, times, centers, lo, config.window_w, config.grid.betas,
                      ref.alpha_ref, ref.block_size, ref.n_blocks, config.cap_value)
    return centers, g


def _zero_reference(values: np.ndarray, centers: np.ndarray, config: MpheConfig) -> np.ndarray:
    lo, _ = config.offsets()
    total = config.reference.total
    out = np.empty(centers.size, dtype=bool)
    for i, c in enumerate(centers):
        blocks = values[c + lo - total:c + lo].reshape(config.reference.n_blocks, -1)
        out[i] = bool(np.all(blocks == blocks[:, :1]))
    return out


def mphe_series(series: TimeSeries, config: MpheConfig = MpheConfig()) -> MpheSeries:
    """Pointwise MPHE G(t) of a dated series.

    Sample times are ``i * config.time_step`` for i = 1..N, so a value at a
    given index depends only on the points up to it (trailing mode).
    """
    n = len(series)
    times = np.arange(1, n + 1, dtype=np.float64) * config.time_step
    idx, g = mphe_values(series.values, times, config)
    return MpheSeries(
        dates=series.dates[idx],
        g_values=g,
        config=config,
        index=idx,
        zero_reference=_zero_reference(series.values, idx, config),
    )


def normalize_mphe(series: MpheSeries) -> MpheSeries:
    """Divide G by its maximum so the largest value is 1."""
    g = np.asarray(series.g_values, dtype=np.float64)
    if g.size == 0:
        raise DataError("cannot normalize an empty MPHE series")
    top = g.max()
    if not top > 0:
        raise DataError("cannot normalize an all-zero MPHE series")
    return replace(series, g_values=g / top, normalized=True)
