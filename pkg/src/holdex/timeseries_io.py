"""Loading, aligning and writing daily series.

CSV files carry a header row with a ``Date`` column (ISO-8601) and one column
per field.  JSON files hold an object with a ``dates`` array plus one array per
named series.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import DataError

INTERSECT = "intersect"
FORWARD_FILL = "ffill"
POLICIES = (INTERSECT, FORWARD_FILL)


@dataclass(frozen=True)
class TimeSeries:
    label: str
    dates: np.ndarray  # datetime64[D], strictly increasing
    values: np.ndarray  # float64

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise DataError(f"{self.label}: series must be one-dimensional and nonempty")
        if dates.shape != values.shape:
            raise DataError(f"{self.label}: {dates.size} dates but {values.size} values")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DataError(f"{self.label}: non-finite value on {dates[bad]}")
        steps = np.diff(dates).astype(np.int64)
        if np.any(steps <= 0):
            bad = int(np.flatnonzero(steps <= 0)[0]) + 1
            kind = "duplicate" if steps[bad - 1] == 0 else "out-of-order"
            raise DataError(f"{self.label}: {kind} date {dates[bad]}")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def time_axis(self) -> np.ndarray:
        """Global normalization t_i = i/N for i = 1..N."""
        n = len(self)
        return np.arange(1, n + 1, dtype=np.float64) / n

    def head(self, m: int) -> "TimeSeries":
        return TimeSeries(self.label, self.dates[:m], self.values[:m])


@dataclass(frozen=True)
class AlignedPanel:
    labels: tuple[str, ...]
    dates: np.ndarray
    matrix: np.ndarray  # (n_series, n_dates)

    def row(self, i: int) -> TimeSeries:
        return TimeSeries(self.labels[i], self.dates, self.matrix[i])


def load_close_series(path, value_column: str = "Close", label: str | None = None,
                      date_column: str = "Date") -> TimeSeries:
    """Read one value column of a dated CSV file, sorted ascending by date.

    Raises :class:`DataError` on a missing file or column, an unparseable row
    (reported with its 1-based data row number), a duplicate date or a
    non-finite value.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    frame = pd.read_csv(path, comment="#", dtype=str, keep_default_na=False)
    for col in (date_column, value_column):
        if col not in frame.columns:
            raise DataError(f"{path}: missing column {col!r} (have {list(frame.columns)})")

    dates = []
    values = []
    for row, (d, v) in enumerate(zip(frame[date_column], frame[value_column]), start=1):
        try:
            dates.append(np.datetime64(d.strip(), "D"))
            x = float(v)
        except ValueError:
            raise DataError(f"{path}: row {row} does not parse as (date, real): {d!r}, {v!r}") from None
        if not math.isfinite(x):
            raise DataError(f"{path}: row {row} has non-finite value {v!r}")
        values.append(x)
    if not dates:
        raise DataError(f"{path}: no data rows")

    dates = np.array(dates, dtype="datetime64[D]")
    values = np.array(values, dtype=np.float64)
    order = np.argsort(dates, kind="stable")
    dates, values = dates[order], values[order]
    dup = np.flatnonzero(np.diff(dates).astype(np.int64) == 0)
    if dup.size:
        raise DataError(f"{path}: duplicate date {dates[dup[0]]}")
    return TimeSeries(label or path.stem, dates, values)


def load_column(path, column: str) -> np.ndarray:
    """Read a single numeric column without any date handling."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    if column not in frame.columns:
        raise DataError(f"{path}: missing column {column!r} (have {list(frame.columns)})")
    values = frame[column].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: column {column!r} has non-finite entries")
    return values


def align_panel(series: Sequence[TimeSeries], policy: str = INTERSECT) -> AlignedPanel:
    """Put several series on one date axis.

    ``intersect`` keeps only dates present in every series.  ``ffill`` uses the
    union of dates and carries each series' last value forward; a series that
    starts after the first union date is an error.
    """
    if not series:
        raise DataError("align_panel needs at least one series")
    if policy not in POLICIES:
        raise DataError(f"unknown alignment policy {policy!r}; expected one of {POLICIES}")

    if policy == INTERSECT:
        axis = series[0].dates
        for s in series[1:]:
            axis = np.intersect1d(axis, s.dates)
        if axis.size == 0:
            raise DataError("date intersection is empty")
        matrix = np.vstack([s.values[np.searchsorted(s.dates, axis)] for s in series])
    else:
        axis = np.unique(np.concatenate([s.dates for s in series]))
        rows = []
        for s in series:
            if s.dates[0] > axis[0]:
                raise DataError(f"{s.label}: leading gap, first date {s.dates[0]} after {axis[0]}")
            pos = np.searchsorted(s.dates, axis, side="right") - 1
            rows.append(s.values[pos])
        matrix = np.vstack(rows)
    return AlignedPanel(tuple(s.label for s in series), axis, matrix)


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    if not directory.is_dir():
        raise DataError(f"cannot write {path}: directory does not exist")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else repr(float(x))
    return str(x)


def write_series(dates, columns: Mapping[str, Sequence], path, fmt: str = "csv",
                 comments: Sequence[str] = ()) -> None:
    """Write named columns sharing one date axis.

    Floats are written with ``repr`` so a CSV round-trips bit-exactly through
    :func:`load_close_series`.  NaN cells are written empty (CSV) or ``null``
    (JSON).  The file is written to a temporary name and renamed into place.
    """
    dates = np.asarray(dates)
    for name, col in columns.items():
        if len(col) != len(dates):
            raise DataError(f"column {name!r} has {len(col)} entries, date axis has {len(dates)}")
    date_strs = [str(d) for d in dates]

    if fmt == "csv":
        lines = [f"# {c}" for c in comments]
        lines.append(",".join(["Date", *columns]))
        cols = [list(c) for c in columns.values()]
        for r, d in enumerate(date_strs):
            lines.append(",".join([d, *(_cell(c[r]) for c in cols)]))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {"dates": date_strs}
        for name, col in columns.items():
            payload[name] = [None if isinstance(v, float) and math.isnan(v) else v
                             for v in np.asarray(col).tolist()]
        text = json.dumps(payload, indent=1) + "\n"
    else:
        raise DataError(f"unknown format {fmt!r}")
    try:
        _atomic_write_text(Path(path), text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def write_json(obj, path) -> None:
    try:
        _atomic_write_text(Path(path), json.dumps(obj, indent=2, default=str) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def write_text(text: str, path) -> None:
    try:
        _atomic_write_text(Path(path), text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
