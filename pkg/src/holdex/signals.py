"""Signal lines, bottom-up crossings and the EMA recurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _kernels
from .errors import DataError

MPHE = "mphe"
JMPHE = "jmphe"


@dataclass(frozen=True)
class SignalConfig:
    """Signal-line height k and history length h.

    When ``history_h`` is None, h = ``history_multiplier`` * window size.
    """

    height_k: float = 1.5
    history_h: int | None = None
    history_multiplier: int = 10

    def __post_init__(self):
        if not self.height_k >= 0:
            raise DataError(f"signal-line height must be nonnegative, got {self.height_k}")
        if self.history_multiplier < 1:
            raise DataError("history_multiplier must be a positive integer")
        if self.history_h is not None and self.history_h < 2:
            raise DataError("history_h must be at least 2")

    def history(self, window_w: int) -> int:
        h = self.history_h if self.history_h is not None else self.history_multiplier * window_w
        if h < 2:
            raise DataError("signal-line history must be at least 2")
        return int(h)


@dataclass(frozen=True)
class SignalEvent:
    date: np.datetime64
    kind: str
    indicator_value: float
    line_value: float
    duration: int = 1  # consecutive dates with indicator > line, starting here
    position: int = -1  # index on the axis the event was detected on


def ema(x, lam: float = 0.3) -> np.ndarray:
    """EMA(1) = x(1); EMA(t) = lam * x(t) + (1 - lam) * EMA(t-1)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DataError("ema needs a nonempty 1-d sequence")
    if not 0.0 < lam <= 1.0:
        raise DataError(f"lambda must lie in (0, 1], got {lam}")
    return _kernels.ema(x, lam)


def signal_line(g, history_h: int, height_k: float) -> np.ndarray:
    """Trailing mean plus k sample standard deviations over h points.

    The window for t covers t-h+1..t.  The output has the length of ``g``
    and is NaN for the first h-1 positions.
    """
    g = np.asarray(g, dtype=np.float64)
    h = int(history_h)
    if h < 2:
        raise DataError("history_h must be at least 2")
    if g.size < h:
        raise DataError(f"signal line needs {h} points of history, got {g.size}")
    if not height_k >= 0:
        raise DataError(f"signal-line height must be nonnegative, got {height_k}")
    win = sliding_window_view(g, h)
    mean = win.sum(axis=1) / h
    std = np.sqrt(((mean[:, None] - win) ** 2).sum(axis=1) / (h - 1))
    out = np.full(g.size, np.nan)
    out[h - 1:] = mean + height_k * std
    return out


def run_lengths_above(g: np.ndarray, line: np.ndarray) -> np.ndarray:
    """Length of the run of g > line starting at each position (0 where not above)."""
    above = g > line
    out = np.zeros(g.size, dtype=np.int64)
    run = 0
    for t in range(g.size - 1, -1, -1):
        run = run + 1 if above[t] else 0
        out[t] = run
    return out


def detect_crossings(g, line, dates, kind: str = MPHE) -> list[SignalEvent]:
    """Events where g(t) > line(t) and g(t-1) <= line(t-1).

    Only positions where both g and line are defined (not NaN) take part; the
    first defined position never carries an event.  Equality counts as not
    above.
    """
    g = np.asarray(g, dtype=np.float64)
    line = np.asarray(line, dtype=np.float64)
    dates = np.asarray(dates)
    if not (g.shape == line.shape == dates.shape):
        raise DataError(f"axis mismatch: g {g.shape}, line {line.shape}, dates {dates.shape}")
    pos = np.flatnonzero(~(np.isnan(g) | np.isnan(line)))
    if pos.size < 2:
        return []
    gd, ld = g[pos], line[pos]
    runs = run_lengths_above(gd, ld)
    up = np.flatnonzero((gd[1:] > ld[1:]) & (gd[:-1] <= ld[:-1])) + 1
    return [SignalEvent(dates[pos[i]], kind, float(gd[i]), float(ld[i]), int(runs[i]), int(pos[i]))
            for i in up]
