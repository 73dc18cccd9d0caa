"""Command-line entry point.

Subcommands: seminorm, mphe, signals, jmphe, backtest, evaluate, genfunc.
Options can also come from a ``key = value`` file passed with ``--config``;
flags given on the command line win.  Every output file gets a
``<name>.meta.json`` sidecar recording the effective configuration.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, _kernels
from .errors import DataError, InvariantError
from .jmphe import DERIVED, EXPLICIT, JmpheThreshold, jmphe_signals, panel_jmphe
from .mhe import CENTERED, TRAILING, MpheConfig, ReferenceConfig, mphe_series, normalize_mphe
from .seminorm import BetaGrid, Window, estimate_holder_by_jump, semi_norm_curve
from .signals import SignalConfig, SignalEvent, detect_crossings, signal_line
from .strategy import (
    TradeRule,
    VixConfig,
    backtest,
    buy_and_hold,
    combine_signals,
    detect_crashes,
    evaluate_predictions,
    vix_signals,
)
from .testfuncs import (
    GenWeierstrassConfig,
    WeierstrassConfig,
    generalized_weierstrass,
    weierstrass,
)
from .timeseries_io import (
    FORWARD_FILL,
    INTERSECT,
    align_panel,
    load_close_series,
    load_column,
    write_json,
    write_series,
    write_text,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# option groups
# ---------------------------------------------------------------------------

def _add_input(p, name="--input", column_default="Close"):
    p.add_argument(name, required=True, help="CSV file with a Date column")
    p.add_argument("--column", default=column_default, help="value column (default %(default)s)")


def _add_mphe(p):
    g = p.add_argument_group("MPHE")
    g.add_argument("-w", "--window", type=int, default=30, help="target window size w")
    g.add_argument("-n", "--grid-n", type=int, default=100, help="beta grid resolution")
    g.add_argument("--alpha-ref", type=float, default=0.5)
    g.add_argument("--block-size", type=int, default=7)
    g.add_argument("--n-blocks", type=int, default=5)
    g.add_argument("--window-mode", choices=(TRAILING, CENTERED), default=TRAILING)
    g.add_argument("--cap", type=float, default=1.0, help="MPHE when the reference is never reached")
    g.add_argument("--time-step", type=float, default=1e-3, help="sample spacing on the MPHE time axis")


def _add_signal(p, k_default=1.5):
    g = p.add_argument_group("signal line")
    g.add_argument("-k", "--height-k", type=float, default=k_default)
    g.add_argument("--history-h", type=int, default=None, help="default: multiplier * w")
    g.add_argument("--history-multiplier", type=int, default=10)


def _add_panel(p, required=True):
    g = p.add_argument_group("panel")
    g.add_argument("--panel", required=required,
                   help="directory of per-stock CSVs or a manifest listing one path per line")
    g.add_argument("--policy", choices=(INTERSECT, FORWARD_FILL), default=INTERSECT)
    g.add_argument("--lambda", dest="lam", type=float, default=0.3)
    g.add_argument("--threshold", type=float, default=None,
                   help="explicit JMPHE line; default 1/(2k)")
    g.add_argument("--workers", type=int, default=1)


def _mphe_config(a) -> MpheConfig:
    return MpheConfig(
        window_w=a.window,
        grid=BetaGrid(a.grid_n),
        reference=ReferenceConfig(a.alpha_ref, a.block_size, a.n_blocks),
        window_mode=a.window_mode,
        cap_value=a.cap,
        time_step=a.time_step,
    )


def _signal_config(a) -> SignalConfig:
    return SignalConfig(a.height_k, a.history_h, a.history_multiplier)


def _threshold(a) -> JmpheThreshold:
    if a.threshold is not None:
        return JmpheThreshold(EXPLICIT, a.threshold, a.height_k)
    return JmpheThreshold(DERIVED, None, a.height_k)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _meta(path, args, extra=None):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in {"func"}}
    payload = {
        "command": args.command,
        "version": __version__,
        "backend": _kernels.BACKEND,
        "config": cfg,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        payload.update(extra)
    write_json(payload, f"{path}.meta.json")


def _panel_paths(source: str) -> list[Path]:
    src = Path(source)
    if src.is_dir():
        paths = sorted(src.glob("*.csv"))
    elif src.is_file():
        lines = [ln.strip() for ln in src.read_text().splitlines()]
        paths = [(src.parent / ln) for ln in lines if ln and not ln.startswith("#")]
    else:
        raise DataError(f"no such panel directory or manifest: {source}")
    if not paths:
        raise DataError(f"panel {source} lists no CSV files")
    return paths


def _load_panel(a):
    series = [load_close_series(p, a.column) for p in _panel_paths(a.panel)]
    return align_panel(series, a.policy)


def _write_events(events, path):
    write_series(
        [e.date for e in events],
        {
            "kind": [e.kind for e in events],
            "indicator": [e.indicator_value for e in events],
            "line": [e.line_value for e in events],
            "duration": [e.duration for e in events],
        },
        path,
    )


def read_events(path) -> list[SignalEvent]:
    """Load an events CSV written by the signals or jmphe subcommands."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    if "Date" not in frame.columns:
        raise DataError(f"{path}: missing Date column")
    out = []
    for _, r in frame.iterrows():
        out.append(SignalEvent(
            np.datetime64(str(r["Date"]), "D"),
            str(r.get("kind", "jmphe")),
            float(r.get("indicator", np.nan)),
            float(r.get("line", np.nan)),
            int(r.get("duration", 1)),
        ))
    return sorted(out, key=lambda e: e.date)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_seminorm(a):
    path = Path(a.input)
    try:
        values = load_close_series(path, a.column).values
    except DataError:
        values = load_column(path, a.column)
    n = values.size
    times = np.arange(1, n + 1, dtype=np.float64) / n
    stop = a.start + a.length
    if a.start < 0 or stop > n:
        raise DataError(f"window [{a.start}, {stop}) outside a series of {n} points")
    curve = semi_norm_curve(Window(values[a.start:stop], times[a.start:stop]), BetaGrid(a.grid_n))
    lines = ["beta,C"] + [f"{b!r},{c!r}" for b, c in zip(curve.betas.tolist(), curve.c_values.tolist())]
    write_text("\n".join(lines) + "\n", a.output)
    try:
        jump = estimate_holder_by_jump(curve)
    except DataError:
        jump = None
    _meta(a.output, a, {"jump_estimate": jump})
    print(f"jump estimate: {jump}")


def cmd_mphe(a):
    series = load_close_series(a.input, a.column)
    ms = mphe_series(series, _mphe_config(a))
    if a.normalize:
        ms = normalize_mphe(ms)
    write_series(ms.dates, {"G": ms.g_values}, a.output)
    _meta(a.output, a, {"points": len(ms), "zero_reference_points": int(ms.zero_reference.sum())})


def cmd_signals(a):
    series = load_close_series(a.input, a.column)
    cfg = _mphe_config(a)
    ms = mphe_series(series, cfg)
    h = _signal_config(a).history(cfg.window_w)
    sl = signal_line(ms.g_values, h, a.height_k)
    write_series(ms.dates, {"G": ms.g_values, "sl": sl}, a.output)
    events = detect_crossings(ms.g_values, sl, ms.dates)
    if a.events:
        _write_events(events, a.events)
        _meta(a.events, a)
    _meta(a.output, a, {"history_h": h, "n_events": len(events)})
    print(f"{len(events)} signals")


def cmd_jmphe(a):
    panel = _load_panel(a)
    js = panel_jmphe(panel, _mphe_config(a), _signal_config(a), a.lam, a.workers)
    events = jmphe_signals(js, _threshold(a))
    write_series(js.dates, {"H": js.h_values, "vote": js.votes}, a.output)
    _meta(a.output, a, {"stocks": list(panel.labels), "threshold": _threshold(a).level,
                        "n_events": len(events)})
    if a.events:
        _write_events(events, a.events)
        _meta(a.events, a)
    print(f"{len(events)} JMPHE signals over {js.n_stocks} stocks")


def cmd_backtest(a):
    prices = load_close_series(a.prices, a.column)
    vix = load_close_series(a.vix, a.vix_column)
    panel = align_panel([prices, vix], INTERSECT)
    prices, vix = panel.row(0), panel.row(1)
    if a.jmphe_events:
        events = read_events(a.jmphe_events)
    elif a.panel:
        js = panel_jmphe(_load_panel(a), _mphe_config(a), _signal_config(a), a.lam, a.workers)
        events = jmphe_signals(js, _threshold(a))
    else:
        raise UsageError("backtest needs --jmphe-events or --panel")
    v_events = vix_signals(vix, VixConfig(a.vix_low, a.vix_high))
    rule = TradeRule(a.combine_window, a.calendar_days)
    instructions = combine_signals(events, v_events, prices.dates, rule)
    result = backtest(prices, instructions)
    bh = buy_and_hold(prices)

    write_series(result.dates, {"equity": result.equity, "position": result.position}, a.equity)
    _meta(a.equity, a)
    if a.trades:
        write_series(
            [t.open_date for t in result.trades],
            {
                "close_date": [str(t.close_date) for t in result.trades],
                "direction": [t.direction for t in result.trades],
                "entry": [t.entry_price for t in result.trades],
                "exit": [t.exit_price for t in result.trades],
                "return": [t.trade_return for t in result.trades],
                "closed": [t.closed for t in result.trades],
            },
            a.trades,
        )
        _meta(a.trades, a)
    metrics = {
        "gross_profit": result.gross_profit,
        "max_drawdown": result.max_drawdown,
        "n_trades": len(result.trades),
        "n_jmphe_signals": len(events),
        "buy_and_hold_gross_profit": bh.gross_profit,
        "buy_and_hold_max_drawdown": bh.max_drawdown,
    }
    if a.metrics:
        write_json(metrics, a.metrics)
        _meta(a.metrics, a)
    print(", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in metrics.items()))


def cmd_evaluate(a):
    index = load_close_series(a.index, a.column)
    signals = read_events(a.signals)
    crashes = detect_crashes(index, a.crash_threshold, a.crash_days)
    summary = evaluate_predictions(signals, crashes, index.dates, a.horizon).as_dict()
    summary["crashes"] = [{"start": str(c.start), "trough": str(c.trough), "decline": c.decline}
                          for c in crashes]
    write_json(summary, a.output)
    _meta(a.output, a)
    print(f"hits={summary['hits']} false={summary['false_signals']} "
          f"predicted={summary['predicted_crashes']} missed={summary['missed_crashes']}")


def cmd_genfunc(a):
    if a.kind == "weierstrass":
        cfg = WeierstrassConfig(a.D, a.b, a.n_min, a.n_max)
        t = np.arange(1, a.points + 1, dtype=np.float64) / a.points
        values = weierstrass(t, cfg)
        echo = [f"kind=weierstrass D={cfg.D!r} b={cfg.b!r} n_min={cfg.n_min} n_max={cfg.n_max}",
                f"t_i = i/{a.points}, i = 1..{a.points}"]
    else:
        k = np.arange(a.first, a.last + 1, dtype=np.float64)
        t = k / a.m
        cfg = GenWeierstrassConfig(k_max=a.k_max, domain=(float(t[0]), float(t[-1])))
        values = generalized_weierstrass(t, cfg)
        echo = [f"kind=generalized s(t)=|sin(5 pi t)| k_max={cfg.k_max}",
                f"t_k = k/{a.m}, k = {a.first}..{a.last}"]
    lines = [f"# {c}" for c in echo] + ["t,value"]
    lines += [f"{x!r},{y!r}" for x, y in zip(np.atleast_1d(t).tolist(), np.atleast_1d(values).tolist())]
    write_text("\n".join(lines) + "\n", a.output)
    _meta(a.output, a)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holdex", description="Modified Hölder exponent indicators.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--config", help="key = value file; command-line flags override it")
        p.set_defaults(func=func)
        return p

    p = add("seminorm", cmd_seminorm, "semi-norm curve C(beta) of one window")
    _add_input(p)
    p.add_argument("--start", type=int, default=0, help="first index of the window")
    p.add_argument("--length", type=int, default=30)
    p.add_argument("-n", "--grid-n", type=int, default=100)
    p.add_argument("-o", "--output", required=True)

    p = add("mphe", cmd_mphe, "pointwise MPHE series G(t)")
    _add_input(p)
    _add_mphe(p)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("signals", cmd_signals, "MPHE, signal line and bottom-up crossings")
    _add_input(p)
    _add_mphe(p)
    _add_signal(p)
    p.add_argument("-o", "--output", required=True, help="Date,G,sl CSV")
    p.add_argument("--events", help="events CSV")

    p = add("jmphe", cmd_jmphe, "joint MPHE over a panel of stocks")
    p.add_argument("--column", default="Close")
    _add_panel(p)
    _add_mphe(p)
    _add_signal(p)
    p.add_argument("-o", "--output", required=True, help="Date,H CSV")
    p.add_argument("--events", help="events CSV")

    p = add("backtest", cmd_backtest, "JMPHE + VIX strategy backtest")
    p.add_argument("--prices", required=True, help="traded index CSV")
    p.add_argument("--column", default="Close")
    p.add_argument("--vix", required=True, help="VIX CSV")
    p.add_argument("--vix-column", default="Close")
    p.add_argument("--jmphe-events", help="events CSV from the jmphe subcommand")
    _add_panel(p, required=False)
    _add_mphe(p)
    _add_signal(p)
    p.add_argument("--vix-low", type=float, default=20.0)
    p.add_argument("--vix-high", type=float, default=30.0)
    p.add_argument("--combine-window", type=int, default=30)
    p.add_argument("--calendar-days", action="store_true")
    p.add_argument("--equity", required=True)
    p.add_argument("--trades")
    p.add_argument("--metrics")

    p = add("evaluate", cmd_evaluate, "score signals against detected crashes")
    p.add_argument("--signals", required=True, help="events CSV")
    p.add_argument("--index", required=True, help="index CSV")
    p.add_argument("--column", default="Close")
    p.add_argument("--crash-threshold", type=float, default=0.09)
    p.add_argument("--crash-days", type=int, default=3)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("-o", "--output", required=True)

    p = add("genfunc", cmd_genfunc, "sample a Weierstrass or generalized Weierstrass function")
    p.add_argument("--kind", choices=("weierstrass", "generalized"), default="weierstrass")
    p.add_argument("--points", type=int, default=1000, help="N for t_i = i/N")
    p.add_argument("--D", type=float, default=1.5)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--n-min", type=int, default=-20)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--first", type=int, default=101)
    p.add_argument("--last", type=int, default=200)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("-o", "--output", required=True)
    return parser


def _read_config(path) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, command: str, path) -> None:
    """Install config-file values as subcommand defaults; flags still override."""
    sub = parser._subparsers._group_actions[0].choices.get(command)
    if sub is None:
        return
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in _read_config(path).items():
        action = known.get(key)
        if action is None or key in {"help", "config", "func"}:
            raise UsageError(f"unknown config key {key!r} for {command}")
        if action.nargs == 0:
            defaults[key] = raw.lower() in {"1", "true", "yes", "on"}
        else:
            defaults[key] = action.type(raw) if action.type else raw
            if action.choices and defaults[key] not in action.choices:
                raise UsageError(f"config {key} = {raw!r} not in {list(action.choices)}")
        action.required = False
    sub.set_defaults(**defaults)


def _preparse(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.command, known.config


def run(argv=None) -> int:
    """Execute one subcommand and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        command, config = _preparse(argv)
        if config:
            _apply_config(parser, command, config)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        args.func(args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"holdex: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as exc:
        print(f"holdex: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main():  # pragma: no cover
    sys.exit(run())
