"""Joint MPHE over a panel of series.

Each stock votes sign(G_i - sl_i) on every common date; H(t) is the EMA of the
mean vote.  Panel-level signals are bottom-up crossings of H over a constant
line.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .mhe import MpheConfig, mphe_series
from .signals import JMPHE, SignalConfig, SignalEvent, detect_crossings, ema, signal_line
from .timeseries_io import AlignedPanel

DERIVED = "derived"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class JmpheSeries:
    dates: np.ndarray
    h_values: np.ndarray
    lam: float
    n_stocks: int
    votes: np.ndarray | None = None


@dataclass(frozen=True)
class JmpheThreshold:
    """Constant signal line for H.

    In ``derived`` mode the value is 1/(2k) for per-stock height k; in
    ``explicit`` mode ``value`` is used as given.
    """

    mode: str = DERIVED
    value: float | None = None
    height_k: float = 1.5

    @property
    def level(self) -> float:
        if self.mode == DERIVED:
            if not self.height_k > 0:
                raise DataError("derived threshold needs a positive height k")
            return 1.0 / (2.0 * self.height_k)
        if self.mode == EXPLICIT:
            if self.value is None:
                raise DataError("explicit threshold needs a value")
            return float(self.value)
        raise DataError(f"unknown threshold mode {self.mode!r}")


def _panel(x, name) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[0] < 1:
        raise DataError(f"{name} must be a nonempty (n_stocks, n_dates) array")
    return x


def sign_vote(g_panel, sl_panel) -> np.ndarray:
    """Per-date mean of sign(G_i - sl_i), with sign(0) = 0."""
    g = _panel(g_panel, "g_panel")
    sl = _panel(sl_panel, "sl_panel")
    if g.shape != sl.shape:
        raise DataError(f"axis mismatch: G panel {g.shape}, signal-line panel {sl.shape}")
    if np.any(np.isnan(g)) or np.any(np.isnan(sl)):
        raise DataError("panels contain undefined entries; restrict to the common axis first")
    return np.sign(g - sl).sum(axis=0) / g.shape[0]


def jmphe(g_panel, sl_panel, lam: float = 0.3, dates=None) -> JmpheSeries:
    """H = ema(sign_vote(G, sl), lam) on the dates where every stock is defined.

    NaN marks an undefined entry; columns with any NaN are dropped.
    """
    g = _panel(g_panel, "g_panel")
    sl = _panel(sl_panel, "sl_panel")
    if g.shape != sl.shape:
        raise DataError(f"axis mismatch: G panel {g.shape}, signal-line panel {sl.shape}")
    if dates is None:
        dates = np.arange(g.shape[1])
    dates = np.asarray(dates)
    if dates.shape != (g.shape[1],):
        raise DataError("date axis does not match the panel width")
    keep = ~(np.isnan(g).any(axis=0) | np.isnan(sl).any(axis=0))
    if not keep.any():
        raise DataError("no date where every stock has both G and a signal line")
    votes = sign_vote(g[:, keep], sl[:, keep])
    return JmpheSeries(dates[keep], ema(votes, lam), float(lam), g.shape[0], votes)


def jmphe_signals(h: JmpheSeries, threshold: JmpheThreshold = JmpheThreshold()) -> list[SignalEvent]:
    level = threshold.level
    if not -1.0 <= level <= 1.0:
        raise DataError(f"JMPHE threshold {level} outside [-1, 1]")
    line = np.full(h.h_values.shape, level)
    return detect_crossings(h.h_values, line, h.dates, kind=JMPHE)


def stock_indicators(panel: AlignedPanel, mphe_config: MpheConfig = MpheConfig(),
                     signal_config: SignalConfig = SignalConfig(),
                     workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """G and sl for every row of an aligned panel, on the panel's date axis.

    Entries before a stock's first defined value are NaN.  ``workers`` > 1
    evaluates stocks concurrently; the result does not depend on it.
    """
    h = signal_config.history(mphe_config.window_w)
    n, t = panel.matrix.shape

    def one(i):
        ms = mphe_series(panel.row(i), mphe_config)
        g_row = np.full(t, np.nan)
        g_row[ms.index] = ms.g_values
        sl_row = np.full(t, np.nan)
        sl_row[ms.index] = signal_line(ms.g_values, h, signal_config.height_k)
        return g_row, sl_row

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(n)))
    else:
        rows = [one(i) for i in range(n)]
    return np.vstack([r[0] for r in rows]), np.vstack([r[1] for r in rows])


def panel_jmphe(panel: AlignedPanel, mphe_config: MpheConfig = MpheConfig(),
                signal_config: SignalConfig = SignalConfig(), lam: float = 0.3,
                workers: int = 1) -> JmpheSeries:
    g, sl = stock_indicators(panel, mphe_config, signal_config, workers)
    return jmphe(g, sl, lam, panel.dates)
