"""Ingestion and validation of daily case-count series.

A series is read from a CSV with header ``day,new_infected,new_died,new_recovered``
and turned into the cumulative quantities used by both the SIR and GLD fits:
cumulative infected T(t), cumulative removed R(t) (died + recovered) and
active infected I(t) = T(t) - R(t).

Day ``d`` is identified with the end of that day, i.e. time ``t = d``.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

COLUMNS = ("day", "new_infected", "new_died", "new_recovered")
DERIVED_COLUMNS = ("cum_infected", "cum_removed", "active")


class ValidationError(ValueError):
    """Raised when an input series violates the ingestion contract.

    ``errors`` holds one ``(row_number, message)`` pair per problem found;
    row numbers count the header as row 1.
    """

    def __init__(self, errors: Sequence[tuple[int | None, str]]):
        self.errors = list(errors)
        lines = [f"row {r}: {m}" if r is not None else m for r, m in self.errors]
        super().__init__("; ".join(lines))


@dataclass(frozen=True)
class DailyRecord:
    day_index: int
    new_infected: int
    new_died: int
    new_recovered: int

    @property
    def new_removed(self) -> int:
        return self.new_died + self.new_recovered


@dataclass(frozen=True)
class GroupedCounts:
    """Counts grouped into bins ``(-inf, t_0], (t_0, t_1], ..., (t_{n-1}, t_n]``."""

    boundaries: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        k = np.asarray(self.counts, dtype=float)
        if b.ndim != 1 or b.shape != k.shape or b.size == 0:
            raise ValueError("boundaries and counts must be 1-d arrays of equal, non-zero length")
        if np.any(np.diff(b) <= 0):
            raise ValueError("bin boundaries must be strictly increasing")
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise ValueError("bin counts must be finite and non-negative")
        if k.sum() <= 0:
            raise ValueError("grouped counts carry no mass")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "counts", k)

    @property
    def n(self) -> int:
        """Index of the last bin boundary (there are n + 1 bins)."""
        return self.boundaries.size - 1

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def truncate(self, t: float) -> "GroupedCounts":
        keep = self.boundaries <= t
        return GroupedCounts(self.boundaries[keep], self.counts[keep])


@dataclass(frozen=True)
class EpidemicSeries:
    """Observed cumulative series on consecutive days.

    ``cum_infected`` and ``cum_removed`` are floats so that noiseless model
    output can be fitted directly (see :meth:`from_cumulative`); series read
    from CSV always carry integer-valued counts in ``records``.
    """

    days: np.ndarray
    cum_infected: np.ndarray
    cum_removed: np.ndarray
    records: tuple[DailyRecord, ...] = field(default=(), repr=False)

    def __post_init__(self):
        days = np.asarray(self.days, dtype=float)
        T = np.asarray(self.cum_infected, dtype=float)
        R = np.asarray(self.cum_removed, dtype=float)
        if days.ndim != 1 or days.size == 0 or T.shape != days.shape or R.shape != days.shape:
            raise ValueError("days, cum_infected and cum_removed must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(days) != 1.0):
            raise ValueError("days must be consecutive")
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(R))):
            raise ValueError("cumulative series must be finite")
        if np.any(T < 0) or np.any(R < 0):
            raise ValueError("cumulative series must be non-negative")
        if np.any(np.diff(T) < 0) or np.any(np.diff(R) < 0):
            raise ValueError("cumulative series must be non-decreasing")
        if np.any(T - R < 0):
            raise ValueError("cumulative removed exceeds cumulative infected")
        for name, arr in (("days", days), ("cum_infected", T), ("cum_removed", R)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_records(cls, records: Iterable[DailyRecord]) -> "EpidemicSeries":
        records = tuple(records)
        if not records:
            raise ValidationError([(None, "series is empty")])
        days = np.array([r.day_index for r in records], dtype=float)
        T = np.cumsum([r.new_infected for r in records], dtype=float)
        R = np.cumsum([r.new_removed for r in records], dtype=float)
        return cls(days, T, R, records)

    @classmethod
    def from_cumulative(cls, cum_infected, cum_removed, first_day: int = 1) -> "EpidemicSeries":
        """Build a series straight from (possibly non-integer) cumulative curves."""
        T = np.asarray(cum_infected, dtype=float)
        days = np.arange(first_day, first_day + T.size, dtype=float)
        return cls(days, T, np.asarray(cum_removed, dtype=float))

    def __len__(self) -> int:
        return self.days.size

    @property
    def active(self) -> np.ndarray:
        return self.cum_infected - self.cum_removed

    @property
    def new_infected(self) -> np.ndarray:
        return np.diff(self.cum_infected, prepend=0.0)

    @property
    def new_removed(self) -> np.ndarray:
        return np.diff(self.cum_removed, prepend=0.0)

    @property
    def last_day(self) -> float:
        return float(self.days[-1])

    def truncate(self, day: float) -> "EpidemicSeries":
        """Series restricted to days ``<= day``."""
        keep = self.days <= day
        if not keep.any():
            raise ValueError(f"no observations on or before day {day}")
        recs = tuple(r for r in self.records if r.day_index <= day)
        return EpidemicSeries(self.days[keep], self.cum_infected[keep], self.cum_removed[keep], recs)

    def value_at(self, day: float) -> float:
        idx = np.flatnonzero(self.days == day)
        if idx.size == 0:
            raise KeyError(day)
        return float(self.cum_infected[idx[0]])


def _parse_int(cell: str, row: int, column: str, errors: list) -> int | None:
    try:
        value = float(cell)
    except ValueError:
        errors.append((row, f"non-numeric {column} {cell!r}"))
        return None
    if not np.isfinite(value) or value != int(value):
        errors.append((row, f"{column} must be an integer, got {cell!r}"))
        return None
    return int(value)


def parse_series(text: str) -> EpidemicSeries:
    """Parse CSV text in the ingestion format; see :func:`load_series`."""
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if any(c.strip() for c in r)]
    if not rows:
        raise ValidationError([(None, "file is empty")])
    header = tuple(c.strip() for c in rows[0])
    if header[: len(COLUMNS)] != COLUMNS:
        raise ValidationError([(1, f"header must start with {','.join(COLUMNS)}, got {','.join(header)}")])
    if len(rows) == 1:
        raise ValidationError([(None, "file has a header but no data rows")])

    errors: list[tuple[int | None, str]] = []
    raw_days: list[tuple[int, str]] = []
    counts: list[tuple[int, int, int] | None] = []
    for rownum, row in enumerate(rows[1:], start=2):
        if len(row) < len(COLUMNS):
            errors.append((rownum, f"expected {len(COLUMNS)} columns, got {len(row)}"))
            counts.append(None)
            raw_days.append((rownum, ""))
            continue
        raw_days.append((rownum, row[0].strip()))
        vals = []
        for col, cell in zip(COLUMNS[1:], row[1:4]):
            v = _parse_int(cell.strip(), rownum, col, errors)
            if v is not None and v < 0:
                errors.append((rownum, f"negative {col} {v}"))
                v = None
            vals.append(v)
        counts.append(tuple(vals) if None not in vals else None)

    day_idx = _day_indices(raw_days, errors)
    if errors:
        raise ValidationError(sorted(errors, key=lambda e: (e[0] or 0)))
    records = [DailyRecord(d, *c) for d, c in zip(day_idx, counts)]
    return EpidemicSeries.from_records(records)


def _day_indices(raw_days: list[tuple[int, str]], errors: list) -> list[int]:
    """Convert the ``day`` column to contiguous integer indices, recording errors."""
    cells = [c for _, c in raw_days]
    dates = None
    if cells and all(_looks_like_date(c) for c in cells if c):
        try:
            dates = [dt.date.fromisoformat(c) for c in cells]
        except ValueError as exc:
            errors.append((None, f"bad ISO-8601 date: {exc}"))
            return []
    if dates is not None:
        start = dates[0]
        idx = [(d - start).days + 1 for d in dates]
    else:
        idx = []
        for rownum, cell in raw_days:
            v = _parse_int(cell, rownum, "day", errors)
            idx.append(v)
    prev = None
    for (rownum, _), d in zip(raw_days, idx):
        if d is None:
            prev = None
            continue
        if prev is not None:
            if d == prev:
                errors.append((rownum, f"duplicate day {d}"))
            elif d < prev:
                errors.append((rownum, f"day {d} out of order after {prev}"))
            elif d != prev + 1:
                errors.append((rownum, f"missing day(s) between {prev} and {d}"))
        prev = d
    return idx


def _looks_like_date(cell: str) -> bool:
    return len(cell) >= 8 and cell[4:5] == "-"


def load_series(path: str | Path) -> EpidemicSeries:
    """Read and validate a daily case-count CSV.

    Raises :class:`ValidationError` listing every offending row (missing or
    duplicate days, negative or non-numeric counts, empty input).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    return parse_series(path.read_text(encoding="utf-8"))


def serialize_series(series: EpidemicSeries) -> str:
    """CSV text with the input columns plus the derived cumulative columns."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS + DERIVED_COLUMNS)
    if series.records:
        rows = [(r.day_index, r.new_infected, r.new_died, r.new_recovered) for r in series.records]
    else:
        # float-valued series: report removals as recoveries
        rows = list(zip(series.days, series.new_infected, np.zeros(len(series)), series.new_removed))
    for (d, ni, nd, nr), T, R, I in zip(rows, series.cum_infected, series.cum_removed, series.active):
        w.writerow([_fmt(d), _fmt(ni), _fmt(nd), _fmt(nr), _fmt(T), _fmt(R), _fmt(I)])
    return out.getvalue()


def write_series(series: EpidemicSeries, path: str | Path) -> None:
    Path(path).write_text(serialize_series(series), encoding="utf-8")


def _fmt(x) -> str:
    x = float(x)
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return f"{x:.17g}"


def susceptible_series(series: EpidemicSeries, N: float) -> np.ndarray:
    """S(t) = N - T(t); requires N to cover every observed case."""
    if N < series.cum_infected.max():
        raise ValueError(
            f"N={N} is below the observed cumulative count {series.cum_infected.max()}; "
            "susceptibles would be negative"
        )
    return N - series.cum_infected


def grouped_counts(series: EpidemicSeries) -> GroupedCounts:
    """Daily bins for the grouped likelihood: k_0 is the total up to day 1's end."""
    return GroupedCounts(series.days.copy(), series.new_infected)
