import json

import numpy as np
import pytest

from holdex import DataError
from holdex.timeseries_io import (
    FORWARD_FILL,
    INTERSECT,
    TimeSeries,
    align_panel,
    load_close_series,
    write_series,
)


def _write(path, text):
    path.write_text(text)
    return path


def test_load_three_rows(tmp_path):
    p = _write(tmp_path / "a.csv", "Date,Open,Close\n2000-01-05,1,12\n2000-01-03,1,10\n2000-01-04,1,11\n")
    s = load_close_series(p)
    assert len(s) == 3
    np.testing.assert_array_equal(s.values, [10, 11, 12])
    assert str(s.dates[0]) == "2000-01-03"
    np.testing.assert_allclose(s.time_axis, [1 / 3, 2 / 3, 1.0], rtol=1e-15)


def test_time_axis_step(tmp_path):
    s = TimeSeries("x", np.datetime64("2000-01-01") + np.arange(1650), np.ones(1650))
    np.testing.assert_allclose(np.diff(s.time_axis), 1 / 1650, rtol=1e-9)
    assert s.time_axis[-1] == 1.0


def test_load_1650_rows(tmp_path):
    dates = np.datetime64("1999-02-25") + np.arange(1650)
    rows = "\n".join(f"{d},{100 + i * 0.5}" for i, d in enumerate(dates))
    s = load_close_series(_write(tmp_path / "djia.csv", "Date,Close\n" + rows + "\n"))
    assert len(s) == 1650


def test_duplicate_date(tmp_path):
    p = _write(tmp_path / "d.csv", "Date,Close\n2000-01-03,1\n2000-01-04,2\n2000-01-03,3\n")
    with pytest.raises(DataError, match="2000-01-03"):
        load_close_series(p)


def test_unparseable_row_reports_row(tmp_path):
    p = _write(tmp_path / "b.csv", "Date,Close\n2000-01-03,1\n2000-01-04,abc\n")
    with pytest.raises(DataError, match="row 2"):
        load_close_series(p)


def test_non_finite(tmp_path):
    p = _write(tmp_path / "n.csv", "Date,Close\n2000-01-03,1\n2000-01-04,inf\n")
    with pytest.raises(DataError, match="non-finite"):
        load_close_series(p)


def test_missing_file_and_column(tmp_path):
    with pytest.raises(DataError):
        load_close_series(tmp_path / "nope.csv")
    p = _write(tmp_path / "c.csv", "Date,Open\n2000-01-03,1\n")
    with pytest.raises(DataError, match="Close"):
        load_close_series(p)


def test_roundtrip_bit_exact(tmp_path, rng):
    dates = np.datetime64("2003-06-02") + np.arange(200)
    values = np.exp(rng.normal(size=200)) * 1234.5678
    write_series(dates, {"Close": values}, tmp_path / "r.csv")
    back = load_close_series(tmp_path / "r.csv")
    np.testing.assert_array_equal(back.values, values)
    np.testing.assert_array_equal(back.dates, dates)


def test_two_columns_shared_date(tmp_path):
    dates = np.datetime64("2003-06-02") + np.arange(3)
    write_series(dates, {"G": [0.1, 0.2, 0.3], "sl": [0.5, 0.5, 0.25]}, tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "Date,G,sl" and lines[1] == "2003-06-02,0.1,0.5"
    assert load_close_series(tmp_path / "g.csv", "sl").values.tolist() == [0.5, 0.5, 0.25]


def test_write_json(tmp_path):
    dates = np.datetime64("2003-06-02") + np.arange(2)
    write_series(dates, {"H": [0.1, float("nan")]}, tmp_path / "h.json", fmt="json")
    payload = json.loads((tmp_path / "h.json").read_text())
    assert payload == {"dates": ["2003-06-02", "2003-06-03"], "H": [0.1, None]}


def test_write_length_mismatch(tmp_path):
    with pytest.raises(DataError):
        write_series(np.arange(3), {"x": [1.0, 2.0]}, tmp_path / "x.csv")


def test_write_unwritable(tmp_path):
    with pytest.raises(DataError):
        write_series(np.arange(1), {"x": [1.0]}, tmp_path / "missing" / "x.csv")


def _s(label, days, values):
    return TimeSeries(label, np.datetime64("2000-01-01") + np.array(days), values)


def test_align_identical_axes():
    a, b = _s("a", [0, 1, 2], [1.0, 2, 3]), _s("b", [0, 1, 2], [4.0, 5, 6])
    panel = align_panel([a, b])
    np.testing.assert_array_equal(panel.dates, a.dates)
    np.testing.assert_array_equal(panel.matrix, [[1, 2, 3], [4, 5, 6]])


def test_align_intersect():
    a, b = _s("a", [0, 1, 2], [1.0, 2, 3]), _s("b", [0, 2], [4.0, 6])
    panel = align_panel([a, b], INTERSECT)
    np.testing.assert_array_equal(panel.dates, b.dates)
    np.testing.assert_array_equal(panel.matrix, [[1, 3], [4, 6]])
    assert set(panel.dates) <= set(a.dates) and set(panel.dates) <= set(b.dates)


def test_align_forward_fill():
    a, b = _s("a", [0, 1, 2], [1.0, 2, 3]), _s("b", [0, 2], [4.0, 6])
    panel = align_panel([a, b], FORWARD_FILL)
    np.testing.assert_array_equal(panel.dates, a.dates)
    np.testing.assert_array_equal(panel.matrix[1], [4, 4, 6])


def test_align_errors():
    a, b = _s("a", [0, 1], [1.0, 2]), _s("b", [5, 6], [1.0, 2])
    with pytest.raises(DataError):
        align_panel([a, b], INTERSECT)
    with pytest.raises(DataError, match="leading gap"):
        align_panel([a, b], FORWARD_FILL)
    with pytest.raises(DataError):
        align_panel([])
    with pytest.raises(DataError):
        align_panel([a], "interpolate")
