"""Meter-reading ingestion, monthly feature matrices and synthetic data.

Readings are held column-wise (numpy arrays) because a few months of
half-hourly data for 50 houses is close to a million rows. ``ReadingTable``
still iterates as a sequence of :class:`Reading` tuples.
"""

from __future__ import annotations

import calendar
import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, TextIO

import numpy as np

from .errors import (
    BadMonthSpec,
    BadTimestamp,
    InvalidArchetypeCount,
    MalformedRow,
    NegativeConsumption,
    NonFiniteValue,
    NoRequestedMonths,
)
from .seeding import rng_for

log = logging.getLogger(__name__)

HEADER = ("series_id", "timestamp", "kwh")
N_DAYS = 28
READINGS_PER_DAY = 48
DEFAULT_NOISE_SIGMA = 0.5

_TS_RE = re.compile(r"^\d{4}-\d{2}-\d{2} \d{2}:\d{2}$")


@dataclass(frozen=True, order=True)
class MonthKey:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise BadMonthSpec(f"month must be in 1..12, got {self.month}")

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @classmethod
    def parse(cls, text: str) -> "MonthKey":
        m = re.fullmatch(r"(\d{4})-(\d{2})", text.strip())
        if m is None:
            raise BadMonthSpec(f"expected YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def n_days(self) -> int:
        return calendar.monthrange(self.year, self.month)[1]


PAPER_MONTHS = tuple(MonthKey(y, m) for y in (2012, 2013) for m in range(1, 7))


def parse_month_spec(spec: str) -> list[MonthKey]:
    """Parse ``YYYY-MM[,YYYY-MM...]`` or the shorthand ``paper-default``."""
    if spec.strip() == "paper-default":
        return list(PAPER_MONTHS)
    parts = [p for p in spec.split(",") if p.strip()]
    if not parts:
        raise BadMonthSpec("empty month list")
    months = [MonthKey.parse(p) for p in parts]
    if len(set(months)) != len(months):
        raise BadMonthSpec(f"duplicate months in {spec!r}")
    return months


class Reading(NamedTuple):
    series_id: str
    timestamp: np.datetime64
    kwh: float


@dataclass
class ReadingTable:
    """Sorted, de-duplicated readings.

    Columns are parallel arrays: ``series_ids`` (str), ``timestamps``
    (``datetime64[m]``) and ``kwh`` (float64).
    """

    series_ids: np.ndarray
    timestamps: np.ndarray
    kwh: np.ndarray
    source: str = "synthetic"
    truth_labels: dict[str, int] | None = None
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.kwh)

    def __iter__(self) -> Iterator[Reading]:
        for s, t, k in zip(self.series_ids, self.timestamps, self.kwh):
            yield Reading(str(s), t, float(k))

    @property
    def rows(self) -> list[Reading]:
        return list(self)

    @classmethod
    def empty(cls, source: str = "synthetic", truth_labels=None) -> "ReadingTable":
        return cls(
            np.array([], dtype=str),
            np.array([], dtype="datetime64[m]"),
            np.array([], dtype=np.float64),
            source=source,
            truth_labels=truth_labels,
        )

    @classmethod
    def from_columns(cls, series_ids, timestamps, kwh, source="synthetic",
                     truth_labels=None) -> "ReadingTable":
        """Sort by (series_id, timestamp) and drop duplicates, keeping the first."""
        series_ids = np.asarray(series_ids, dtype=str)
        timestamps = np.asarray(timestamps, dtype="datetime64[m]")
        kwh = np.asarray(kwh, dtype=np.float64)
        warnings: list[str] = []
        if len(kwh) == 0:
            table = cls.empty(source, truth_labels)
            return table
        order = np.lexsort((timestamps, series_ids))  # stable: first occurrence wins
        series_ids, timestamps, kwh = series_ids[order], timestamps[order], kwh[order]
        dup = np.zeros(len(kwh), dtype=bool)
        dup[1:] = (series_ids[1:] == series_ids[:-1]) & (timestamps[1:] == timestamps[:-1])
        if dup.any():
            for i in np.flatnonzero(dup)[:20]:
                warnings.append(
                    f"duplicate reading ({series_ids[i]}, {_fmt_ts(timestamps[i])}) ignored"
                )
            if dup.sum() > 20:
                warnings.append(f"{int(dup.sum()) - 20} further duplicate readings ignored")
            keep = ~dup
            series_ids, timestamps, kwh = series_ids[keep], timestamps[keep], kwh[keep]
        for w in warnings:
            log.warning(w)
        return cls(series_ids, timestamps, kwh, source=source,
                   truth_labels=truth_labels, warnings=warnings)

    def to_csv(self, stream: TextIO) -> None:
        stream.write(",".join(HEADER) + "\n")
        for s, t, k in zip(self.series_ids, self.timestamps, self.kwh):
            stream.write(f"{s},{_fmt_ts(t)},{float(k)!r}\n")

    def truth_csv(self, stream: TextIO) -> None:
        stream.write("series_id,archetype\n")
        for sid, a in sorted((self.truth_labels or {}).items()):
            stream.write(f"{sid},{a}\n")


def _fmt_ts(t: np.datetime64) -> str:
    return str(t.astype("datetime64[m]")).replace("T", " ")


def parse_readings(stream: Iterable[str] | TextIO, source: str = "<stream>") -> ReadingTable:
    """Parse ``series_id,timestamp,kwh`` CSV text into a :class:`ReadingTable`.

    Timestamps must be ``YYYY-MM-DD HH:MM``. Raises :class:`MalformedRow`,
    :class:`BadTimestamp`, :class:`NegativeConsumption` or
    :class:`NonFiniteValue` naming the offending line.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return ReadingTable.empty(source)
    if tuple(h.strip() for h in header) != HEADER:
        raise MalformedRow(f"line 1: expected header {','.join(HEADER)}, got {','.join(header)}")
    ids: list[str] = []
    stamps: list[str] = []
    values: list[float] = []
    match = _TS_RE.match
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise MalformedRow(f"line {lineno}: expected 3 columns, got {len(row)}")
        sid, ts, raw = row
        if match(ts) is None:
            raise BadTimestamp(f"line {lineno}: cannot parse timestamp {ts!r}")
        try:
            k = float(raw)
        except ValueError:
            raise MalformedRow(f"line {lineno}: kwh {raw!r} is not a number") from None
        if not math.isfinite(k):
            raise NonFiniteValue(f"line {lineno}: kwh {raw!r} is not finite")
        if k < 0:
            raise NegativeConsumption(f"line {lineno}: kwh {raw!r} is negative")
        ids.append(sid)
        stamps.append(ts)
        values.append(k)
    try:
        ts_arr = np.array(stamps, dtype="datetime64[m]")
    except ValueError:
        ts_arr = None
    if ts_arr is None or len(ts_arr) != len(stamps):
        # find the offending line for the message
        for i, ts in enumerate(stamps):
            try:
                np.datetime64(ts, "m")
            except ValueError:
                raise BadTimestamp(f"line {i + 2}: cannot parse timestamp {ts!r}") from None
    return ReadingTable.from_columns(ids, ts_arr, values, source=source)


def read_csv(path: str) -> ReadingTable:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_readings(fh, source=str(path))


@dataclass
class MonthlyMatrix:
    month: MonthKey
    series_ids: list[str]
    values: np.ndarray  # n x 28 daily totals
    dropped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.series_ids)


def build_monthly_matrices(table: ReadingTable, months: list[MonthKey]) -> list[MonthlyMatrix]:
    """One ``n x 28`` matrix of daily kWh totals per requested month.

    A series enters a month only if it has at least one reading on each of
    days 1..28; otherwise it is listed in ``dropped`` as
    ``missing_day:<first missing day>``.
    """
    if not months:
        raise NoRequestedMonths("at least one month is required")
    if len(set(months)) != len(months):
        raise BadMonthSpec("requested months must be distinct")

    month_of = table.timestamps.astype("datetime64[M]")
    day_of = (table.timestamps.astype("datetime64[D]") - month_of.astype("datetime64[D]")).astype(int)
    out = []
    for mk in months:
        target = np.datetime64(f"{mk.year:04d}-{mk.month:02d}", "M")
        in_month = np.flatnonzero(month_of == target)
        if len(in_month) == 0:
            out.append(MonthlyMatrix(mk, [], np.zeros((0, N_DAYS)), []))
            continue
        names, codes = np.unique(table.series_ids[in_month], return_inverse=True)
        days = day_of[in_month]
        early = days < N_DAYS
        totals = np.zeros((len(names), N_DAYS))
        counts = np.zeros((len(names), N_DAYS), dtype=np.int64)
        np.add.at(totals, (codes[early], days[early]), table.kwh[in_month][early])
        np.add.at(counts, (codes[early], days[early]), 1)
        complete = (counts > 0).all(axis=1)
        dropped = []
        for i in np.flatnonzero(~complete):
            first_missing = int(np.argmax(counts[i] == 0)) + 1
            dropped.append((str(names[i]), f"missing_day:{first_missing}"))
        out.append(MonthlyMatrix(
            mk,
            [str(s) for s in names[complete]],
            totals[complete],
            dropped,
        ))
    return out


def archetype_template(a: int, n_archetypes: int, n_days: int, noise_sigma: float) -> np.ndarray:
    """Daily-total template of archetype ``a`` for days 1..n_days.

    level + 3 sin(2 pi d / 7 + phase): a weekly cycle whose phase is spread
    evenly over the archetypes and whose base level steps by
    ``max(6, 12 * noise_sigma)`` kWh. The sinusoid has whole periods over
    days 1..28, so it is orthogonal to the level and any two templates are
    at least ``step * sqrt(28)`` apart on the first 28 days.
    """
    step = max(6.0, 12.0 * noise_sigma)
    level = 8.0 + step * a
    phase = 2.0 * np.pi * a / n_archetypes
    d = np.arange(1, n_days + 1)
    return level + 3.0 * np.sin(2.0 * np.pi * d / 7.0 + phase)


def synth_generate(n_series: int, n_archetypes: int, months: list[MonthKey],
                   noise_sigma: float = DEFAULT_NOISE_SIGMA, seed: int = 0) -> ReadingTable:
    """Planted-cluster half-hourly readings.

    Series ``s<i>`` follows archetype ``i % n_archetypes``. Each day's total
    is the template value plus N(0, noise_sigma^2), clamped at 0, then split
    evenly into 48 half-hourly readings.
    """
    if n_series < 0 or n_archetypes < 1:
        raise InvalidArchetypeCount("n_series must be >= 0 and n_archetypes >= 1")
    if n_series > 0 and n_archetypes > n_series:
        raise InvalidArchetypeCount(
            f"n_archetypes={n_archetypes} exceeds n_series={n_series}")
    if noise_sigma < 0 or not math.isfinite(noise_sigma):
        raise NonFiniteValue(f"noise_sigma must be finite and >= 0, got {noise_sigma}")
    if n_series == 0:
        return ReadingTable.empty("synthetic", truth_labels={})

    rng = rng_for(seed)
    sids = [f"s{i}" for i in range(n_series)]
    truth = {sid: i % n_archetypes for i, sid in enumerate(sids)}
    half_hours = np.arange(READINGS_PER_DAY, dtype="timedelta64[m]") * 30

    id_cols, ts_cols, kwh_cols = [], [], []
    for mk in months:
        nd = mk.n_days
        day0 = np.datetime64(f"{mk.year:04d}-{mk.month:02d}-01", "m")
        stamps = (day0 + np.arange(nd).astype("timedelta64[D]")[:, None] + half_hours).ravel()
        noise = rng.normal(0.0, 1.0, size=(n_series, nd)) * noise_sigma
        for i, sid in enumerate(sids):
            tmpl = archetype_template(truth[sid], n_archetypes, nd, noise_sigma)
            daily = np.maximum(tmpl + noise[i], 0.0)
            id_cols.append(np.full(nd * READINGS_PER_DAY, sid))
            ts_cols.append(stamps)
            kwh_cols.append(np.repeat(daily / READINGS_PER_DAY, READINGS_PER_DAY))
    if not kwh_cols:
        return ReadingTable.empty("synthetic", truth_labels=truth)
    return ReadingTable.from_columns(
        np.concatenate(id_cols), np.concatenate(ts_cols), np.concatenate(kwh_cols),
        source="synthetic", truth_labels=truth,
    )


def table_to_csv_text(table: ReadingTable) -> str:
    buf = io.StringIO()
    table.to_csv(buf)
    return buf.getvalue()
