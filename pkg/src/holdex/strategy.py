"""VIX direction signals, the JMPHE+VIX position rules, backtesting and crash scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, InvariantError
from .signals import SignalEvent
from .timeseries_io import TimeSeries

LONG = "long"
SHORT = "short"
FLAT = "flat"
OPEN_LONG = "open-long"
OPEN_SHORT = "open-short"
CLOSE = "close"

# Absolute slack on the crash threshold so that scaled prices classify the same.
CRASH_RTOL = 1e-12


@dataclass(frozen=True)
class VixConfig:
    low_threshold: float = 20.0
    high_threshold: float = 30.0

    def __post_init__(self):
        if not self.low_threshold < self.high_threshold:
            raise DataError("VIX low threshold must be below the high threshold")


@dataclass(frozen=True)
class TradeRule:
    """How long after a JMPHE signal a VIX signal may still open a position.

    ``combine_window_days`` counts trading days (rows of the date axis) unless
    ``calendar_days`` is set.
    """

    combine_window_days: int = 30
    calendar_days: bool = False

    def __post_init__(self):
        if self.combine_window_days < 0:
            raise DataError("combine_window_days must be nonnegative")


@dataclass(frozen=True)
class Instruction:
    date: np.datetime64
    action: str


@dataclass(frozen=True)
class Trade:
    open_date: np.datetime64
    close_date: np.datetime64
    direction: str
    entry_price: float
    exit_price: float
    trade_return: float
    closed: bool = True  # False when marked to the final close


@dataclass
class BacktestResult:
    dates: np.ndarray
    equity: np.ndarray
    position: np.ndarray
    trades: list[Trade] = field(default_factory=list)

    @property
    def gross_profit(self) -> float:
        return float(self.equity[-1] / self.equity[0] - 1.0)

    @property
    def max_drawdown(self) -> float:
        return max_drawdown(self.equity)


@dataclass(frozen=True)
class CrashEvent:
    start: np.datetime64
    trough: np.datetime64
    decline: float
    horizon_days: int
    position: int = -1


def vix_signals(vix: TimeSeries, config: VixConfig = VixConfig()) -> list[tuple[np.datetime64, str]]:
    """Long on every date with VIX below the low threshold; short where VIX
    crosses the high threshold bottom-up."""
    v = vix.values
    out = []
    for t in range(v.size):
        if v[t] < config.low_threshold:
            out.append((vix.dates[t], LONG))
        elif t > 0 and v[t] > config.high_threshold and v[t - 1] <= config.high_threshold:
            out.append((vix.dates[t], SHORT))
    return out


def _positions(dates: np.ndarray, when) -> np.ndarray:
    when = np.asarray(when, dtype=dates.dtype)
    pos = np.searchsorted(dates, when)
    bad = (pos >= dates.size) | (dates[np.minimum(pos, dates.size - 1)] != when)
    if np.any(bad):
        raise DataError(f"date {when[bad][0]} is not on the trading axis")
    return pos


def combine_signals(jmphe_events: Sequence[SignalEvent], vix_events, dates,
                    rule: TradeRule = TradeRule()) -> list[Instruction]:
    """Turn JMPHE timing signals and VIX direction signals into instructions.

    A JMPHE signal arms an entry for its own duration plus the combine window
    after it ends.  While flat and armed, the first VIX signal opens a position
    in its direction and consumes the arming.  A new JMPHE signal closes any
    open position.  A short also closes on a VIX long signal; a long ignores
    VIX short signals.  On one date a close is processed before an open.
    """
    dates = np.asarray(dates, dtype="datetime64[D]")
    if dates.size == 0:
        return []
    if np.any(np.diff(dates).astype(np.int64) <= 0):
        raise DataError("date axis must be strictly increasing")

    starts = {}
    if jmphe_events:
        pos = _positions(dates, [e.date for e in jmphe_events])
        for p, e in zip(pos, jmphe_events):
            starts[int(p)] = max(int(e.duration), 1)
    vix_at = {}
    if vix_events:
        pos = _positions(dates, [d for d, _ in vix_events])
        for p, (_, direction) in zip(pos, vix_events):
            if direction not in (LONG, SHORT):
                raise DataError(f"unknown VIX signal direction {direction!r}")
            vix_at[int(p)] = direction

    out: list[Instruction] = []
    state = FLAT
    armed_until = None  # last index (trading mode) or date (calendar mode) an entry is allowed
    for t in range(dates.size):
        if t in starts:
            if state != FLAT:
                out.append(Instruction(dates[t], CLOSE))
                state = FLAT
            end = t + starts[t] - 1
            if rule.calendar_days:
                armed_until = dates[end] + np.timedelta64(rule.combine_window_days, "D")
            else:
                armed_until = end + rule.combine_window_days
        signal = vix_at.get(t)
        if signal is None:
            continue
        if state == SHORT and signal == LONG:
            out.append(Instruction(dates[t], CLOSE))
            state = FLAT
            continue
        if state != FLAT or armed_until is None:
            continue
        now = dates[t] if rule.calendar_days else t
        if now <= armed_until:
            out.append(Instruction(dates[t], OPEN_LONG if signal == LONG else OPEN_SHORT))
            state = signal
            armed_until = None
    _check_exclusive(out)
    return out


def _check_exclusive(instructions: Sequence[Instruction]) -> None:
    state = FLAT
    for ins in instructions:
        if ins.action == CLOSE:
            if state == FLAT:
                raise InvariantError(f"close on {ins.date} with no open position")
            state = FLAT
        elif ins.action in (OPEN_LONG, OPEN_SHORT):
            if state != FLAT:
                raise InvariantError(f"open on {ins.date} while a position is open")
            state = LONG if ins.action == OPEN_LONG else SHORT
        else:
            raise InvariantError(f"unknown instruction {ins.action!r}")


def backtest(prices: TimeSeries, instructions: Sequence[Instruction],
             initial_capital: float = 1.0) -> BacktestResult:
    """All-in, commission-free simulation at the close of each instruction date.

    Equity is marked to market daily.  Long return is exit/entry - 1, short
    return is (entry - exit)/entry on the full capital; capital compounds from
    trade to trade.  A position still open at the last date is marked to the final
    close and logged with ``closed=False``.
    """
    if not initial_capital > 0:
        raise DataError("initial capital must be positive")
    _check_exclusive(instructions)
    dates, px = prices.dates, prices.values
    by_index: dict[int, list[str]] = {}
    if instructions:
        pos = _positions(dates, [i.date for i in instructions])
        for p, ins in zip(pos, instructions):
            by_index.setdefault(int(p), []).append(ins.action)

    equity = np.empty(px.size)
    position = np.empty(px.size, dtype=object)
    trades: list[Trade] = []
    capital = float(initial_capital)
    state, entry, opened = FLAT, 0.0, None

    def mark(t):
        if state == LONG:
            return capital * (px[t] / entry)
        if state == SHORT:
            return capital * (1.0 + (entry - px[t]) / entry)
        return capital

    def settle(t, closed=True):
        nonlocal capital, state
        r = px[t] / entry - 1.0 if state == LONG else (entry - px[t]) / entry
        trades.append(Trade(opened, dates[t], state, entry, float(px[t]), float(r), closed))
        capital *= 1.0 + r
        state = FLAT

    for t in range(px.size):
        for action in by_index.get(t, ()):
            if action == CLOSE:
                settle(t)
            else:
                state = LONG if action == OPEN_LONG else SHORT
                entry, opened = float(px[t]), dates[t]
        equity[t] = mark(t)
        position[t] = state
    if state != FLAT:
        settle(px.size - 1, closed=False)
        equity[-1] = capital
    if np.any(equity <= 0):
        raise DataError("equity went nonpositive (short against a price that more than doubled)")
    return BacktestResult(dates, equity, position, trades)


def buy_and_hold(prices: TimeSeries) -> BacktestResult:
    return backtest(prices, [Instruction(prices.dates[0], OPEN_LONG)])


def max_drawdown(equity) -> float:
    """max over t of 1 - equity(t) / running max."""
    e = np.asarray(equity, dtype=np.float64)
    if e.size == 0:
        raise DataError("empty equity curve")
    if np.any(~(e > 0)):
        raise DataError("equity must be positive")
    return float(np.max(1.0 - e / np.maximum.accumulate(e)))


def detect_crashes(index: TimeSeries, threshold: float = 0.09, horizon_days: int = 3) -> list[CrashEvent]:
    """Dates where the price fell by at least ``threshold`` over ``horizon_days`` rows.

    Runs of consecutive qualifying dates merge into one event starting at the
    first of them; the trough is the lowest close in the run.
    """
    p = index.values
    if horizon_days < 1:
        raise DataError("horizon_days must be positive")
    if p.size <= horizon_days:
        raise DataError(f"need more than {horizon_days} prices, got {p.size}")
    if np.any(p <= 0):
        raise DataError("prices must be positive")
    past = p[:-horizon_days]
    decline = (past - p[horizon_days:]) / past
    hit = np.zeros(p.size, dtype=bool)
    hit[horizon_days:] = decline >= threshold - CRASH_RTOL
    dec = np.zeros(p.size)
    dec[horizon_days:] = decline

    events = []
    t = 0
    while t < p.size:
        if not hit[t]:
            t += 1
            continue
        s = t
        while t < p.size and hit[t]:
            t += 1
        trough = s + int(np.argmin(p[s:t]))
        events.append(CrashEvent(index.dates[s], index.dates[trough], float(dec[s:t].max()),
                                 horizon_days, s))
    return events


@dataclass
class PredictionSummary:
    hits: int
    false_signals: int
    predicted_crashes: int
    missed_crashes: int
    lead_times: list[int]  # one per predicted crash, in trading days
    signal_outcomes: list[dict]

    def as_dict(self) -> dict:
        return {
            "hits": self.hits,
            "false_signals": self.false_signals,
            "predicted_crashes": self.predicted_crashes,
            "missed_crashes": self.missed_crashes,
            "lead_times": self.lead_times,
            "signals": self.signal_outcomes,
        }


def evaluate_predictions(signals: Sequence[SignalEvent], crashes: Sequence[CrashEvent], dates,
                         horizon: int = 100) -> PredictionSummary:
    """Score signals against crash starts.

    A signal hits if the nearest crash starting strictly after it starts within
    ``horizon`` trading days.  Lead time of a predicted crash is counted from
    its earliest hitting signal.
    """
    dates = np.asarray(dates, dtype="datetime64[D]")
    sig_pos = _positions(dates, [s.date for s in signals]) if signals else np.array([], int)
    crash_pos = _positions(dates, [c.start for c in crashes]) if crashes else np.array([], int)
    crash_pos = np.sort(crash_pos)

    earliest: dict[int, int] = {}
    outcomes = []
    hits = 0
    for s, p in zip(signals, sig_pos):
        j = np.searchsorted(crash_pos, p, side="right")
        outcome = {"date": str(s.date), "hit": False, "crash": None, "lead": None}
        if j < crash_pos.size and crash_pos[j] - p <= horizon:
            c = int(crash_pos[j])
            hits += 1
            earliest[c] = min(earliest.get(c, p), p)
            outcome.update(hit=True, crash=str(dates[c]), lead=int(c - p))
        outcomes.append(outcome)
    leads = [int(c - earliest[c]) for c in crash_pos if c in earliest]
    return PredictionSummary(
        hits=hits,
        false_signals=len(sig_pos) - hits,
        predicted_crashes=len(leads),
        missed_crashes=int(crash_pos.size) - len(leads),
        lead_times=leads,
        signal_outcomes=outcomes,
    )
