import json

import numpy as np
import pandas as pd
import pytest

from holdex.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, read_events, run
from holdex.timeseries_io import load_close_series, write_series


@pytest.fixture
def walk_csv(tmp_path, rng):
    def make(name, n=700, seed_shift=0.0, start="2000-01-03"):
        dates = np.datetime64(start) + np.arange(n)
        values = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, size=n)) + seed_shift)
        path = tmp_path / name
        write_series(dates, {"Close": values}, path)
        return path
    return make


def test_genfunc_defaults(tmp_path):
    out = tmp_path / "w.csv"
    assert run(["genfunc", "-o", str(out)]) == EXIT_OK
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "t,value" and len(lines) == 1001
    assert out.read_text().startswith("# kind=weierstrass D=1.5")
    meta = json.loads((tmp_path / "w.csv.meta.json").read_text())
    assert meta["config"]["points"] == 1000


def test_genfunc_generalized(tmp_path):
    out = tmp_path / "v.csv"
    assert run(["genfunc", "--kind", "generalized", "-o", str(out)]) == EXIT_OK
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert len(lines) == 101 and lines[1].startswith("1.01,")


def test_unknown_subcommand(capsys):
    assert run(["frobnicate"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_no_subcommand(capsys):
    assert run([]) == EXIT_USAGE


def test_bad_flag(capsys):
    assert run(["genfunc", "--nope", "-o", "x"]) == EXIT_USAGE


def test_mphe_too_short(tmp_path, walk_csv, capsys):
    path = walk_csv("short.csv", n=10)
    assert run(["mphe", "--input", str(path), "-o", str(tmp_path / "g.csv")]) == EXIT_DATA
    assert "65" in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path):
    assert run(["mphe", "--input", str(tmp_path / "none.csv"), "-o", str(tmp_path / "g.csv")]) == EXIT_DATA


def test_seminorm_on_genfunc_output(tmp_path, capsys):
    src = tmp_path / "w.csv"
    run(["genfunc", "-o", str(src)])
    out = tmp_path / "c.csv"
    assert run(["seminorm", "--input", str(src), "--column", "value", "-o", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "beta,C" and len(rows) == 101
    jump = float(capsys.readouterr().out.split(":")[1])
    assert 0.43 <= jump <= 0.57


def test_mphe_and_signals(tmp_path, walk_csv):
    src = walk_csv("gm.csv")
    g = tmp_path / "g.csv"
    assert run(["mphe", "--input", str(src), "-o", str(g)]) == EXIT_OK
    assert len(load_close_series(g, "G")) == 700 - 64
    sig, ev = tmp_path / "s.csv", tmp_path / "e.csv"
    assert run(["signals", "--input", str(src), "-o", str(sig), "--events", str(ev)]) == EXIT_OK
    frame = pd.read_csv(sig)
    assert len(frame) == 700 - 64 and frame["sl"].notna().sum() == 700 - 64 - 299
    events = read_events(ev)
    assert all(e.kind == "mphe" for e in events)


def test_config_file_overridden_by_flag(tmp_path, walk_csv):
    src = walk_csv("gm.csv")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"input = {src}\nwindow = 20\n# comment\noutput = {tmp_path / 'g.csv'}\n")
    assert run(["mphe", "--config", str(cfg)]) == EXIT_OK
    assert len(load_close_series(tmp_path / "g.csv", "G")) == 700 - 54
    assert run(["mphe", "--config", str(cfg), "-w", "30"]) == EXIT_OK
    assert len(load_close_series(tmp_path / "g.csv", "G")) == 700 - 64
    meta = json.loads((tmp_path / "g.csv.meta.json").read_text())
    assert meta["config"]["window"] == 30


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run(["genfunc", "--config", str(cfg), "-o", str(tmp_path / "x.csv")]) == EXIT_USAGE


def _panel(tmp_path, walk_csv, n=3):
    d = tmp_path / "panel"
    d.mkdir()
    for i in range(n):
        walk_csv(f"panel/s{i}.csv")
    return d


def test_jmphe_directory_and_manifest(tmp_path, walk_csv):
    d = _panel(tmp_path, walk_csv)
    h1, e1 = tmp_path / "h1.csv", tmp_path / "e1.csv"
    assert run(["jmphe", "--panel", str(d), "-o", str(h1), "--events", str(e1)]) == EXIT_OK
    manifest = tmp_path / "stocks.txt"
    manifest.write_text("panel/s0.csv\npanel/s1.csv\npanel/s2.csv\n")
    h2 = tmp_path / "h2.csv"
    assert run(["jmphe", "--panel", str(manifest), "-o", str(h2), "--workers", "3"]) == EXIT_OK
    assert h1.read_bytes() == h2.read_bytes()
    h = load_close_series(h1, "H").values
    assert np.all(np.abs(h) <= 1)


def test_backtest_and_evaluate(tmp_path, walk_csv):
    d = _panel(tmp_path, walk_csv)
    prices = walk_csv("spx.csv")
    dates = np.datetime64("2000-01-03") + np.arange(700)
    vix = 25 + 8 * np.sin(np.arange(700) / 15.0)
    write_series(dates, {"Close": vix}, tmp_path / "vix.csv")
    ev = tmp_path / "e.csv"
    run(["jmphe", "--panel", str(d), "-o", str(tmp_path / "h.csv"), "--events", str(ev)])

    args = ["backtest", "--prices", str(prices), "--vix", str(tmp_path / "vix.csv"),
            "--jmphe-events", str(ev), "--equity", str(tmp_path / "eq.csv"),
            "--trades", str(tmp_path / "tr.csv"), "--metrics", str(tmp_path / "m.json")]
    assert run(args) == EXIT_OK
    m = json.loads((tmp_path / "m.json").read_text())
    assert set(m) >= {"gross_profit", "max_drawdown", "n_trades"}
    first = (tmp_path / "eq.csv").read_bytes()
    assert run(args) == EXIT_OK
    assert (tmp_path / "eq.csv").read_bytes() == first

    in_process = ["backtest", "--prices", str(prices), "--vix", str(tmp_path / "vix.csv"),
                  "--panel", str(d), "--equity", str(tmp_path / "eq2.csv")]
    assert run(in_process) == EXIT_OK
    assert (tmp_path / "eq2.csv").read_bytes() == first

    out = tmp_path / "eval.json"
    assert run(["evaluate", "--signals", str(ev), "--index", str(prices), "-o", str(out)]) == EXIT_OK
    summary = json.loads(out.read_text())
    assert summary["hits"] + summary["false_signals"] == len(read_events(ev))


def test_backtest_needs_events(tmp_path, walk_csv):
    prices = walk_csv("spx.csv")
    assert run(["backtest", "--prices", str(prices), "--vix", str(prices),
                "--equity", str(tmp_path / "eq.csv")]) == EXIT_USAGE
