"""Hourly GHI series, unit conversion, index shifting and timestamp joins.

Timestamps are stored as ``numpy.datetime64`` values with hour resolution,
interpreted as UTC.  All containers are frozen and their arrays are
read-only, so they can be shared freely between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from .errors import DataError

# Reanalysis SSRD is accumulated over 3 hours.
ACCUMULATION_SECONDS = 3 * 3600

HOUR = np.timedelta64(1, "h")


class Source(enum.Enum):
    GROUND = "ground"
    SATELLITE = "satellite"


class Unit(enum.Enum):
    WATTS_PER_SQM = "W_per_m2"
    JOULES_PER_SQM_ACCUM = "J_per_m2_3h"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def as_hours(times) -> np.ndarray:
    """Coerce timestamps to ``datetime64[h]``, refusing sub-hourly components."""
    raw = np.asarray(times)
    if raw.dtype.kind != "M":
        raw = raw.astype("datetime64[m]")
    hours = raw.astype("datetime64[h]")
    if raw.size and np.any(hours.astype(raw.dtype) != raw):
        raise DataError("timestamps must fall exactly on the hour")
    return hours


def hour_from_datetime(dt: datetime) -> np.datetime64:
    if dt.tzinfo is None or dt.utcoffset() != timezone.utc.utcoffset(None):
        raise DataError(f"timestamp {dt!r} is not UTC")
    if dt.minute or dt.second or dt.microsecond:
        raise DataError(f"timestamp {dt.isoformat()} is not on the hour")
    return np.datetime64(dt.replace(tzinfo=None), "h")


def calendar_fields(times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (year, month 1-12, day-of-month 1-31, hour 0-23) arrays."""
    times = np.asarray(times, dtype="datetime64[h]")
    month_start = times.astype("datetime64[M]")
    day_start = times.astype("datetime64[D]")
    year = times.astype("datetime64[Y]").astype(np.int64) + 1970
    month = month_start.astype(np.int64) % 12 + 1
    day = (day_start - month_start.astype("datetime64[D]")).astype(np.int64) + 1
    hour = (times - day_start.astype("datetime64[h]")).astype(np.int64)
    return year, month, day, hour


def format_timestamp(t: np.datetime64) -> str:
    return f"{np.datetime_as_string(np.datetime64(t, 'm'))}Z"


def _check_increasing(times: np.ndarray, what: str) -> None:
    if times.size > 1 and not np.all(times[1:] > times[:-1]):
        raise DataError(f"{what}: timestamps must be strictly increasing")


@dataclass(frozen=True)
class GhiSeries:
    source: Source
    unit: Unit
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = as_hours(self.times)
        values = np.asarray(self.values, dtype=np.float64)
        if times.shape != values.shape or times.ndim != 1:
            raise DataError("times and values must be 1-D arrays of equal length")
        if not np.all(np.isfinite(values)):
            raise DataError("GHI values must be finite")
        if np.any(values < 0):
            raise DataError("GHI values must be non-negative")
        _check_increasing(times, f"{self.source.value} series")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return int(self.times.size)

    def span(self) -> tuple[np.datetime64, np.datetime64] | None:
        if not len(self):
            return None
        return self.times[0], self.times[-1]


@dataclass(frozen=True)
class Provenance:
    """Bookkeeping of rows that did not make it into an AlignedTable."""

    ground_unmatched: int = 0
    satellite_unmatched: int = 0
    daylight_dropped: int = 0


@dataclass(frozen=True)
class AlignedTable:
    """Timestamp-joined (ground, satellite) pairs, both in W/m2."""

    times: np.ndarray
    ground: np.ndarray
    satellite: np.ndarray
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        times = as_hours(self.times)
        ground = np.asarray(self.ground, dtype=np.float64)
        satellite = np.asarray(self.satellite, dtype=np.float64)
        if not (times.shape == ground.shape == satellite.shape) or times.ndim != 1:
            raise DataError("aligned columns must be 1-D and of equal length")
        _check_increasing(times, "aligned table")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "ground", _frozen(ground))
        object.__setattr__(self, "satellite", _frozen(satellite))

    def __len__(self) -> int:
        return int(self.times.size)

    def take(self, mask_or_index, provenance: Provenance | None = None) -> "AlignedTable":
        return AlignedTable(
            self.times[mask_or_index],
            self.ground[mask_or_index],
            self.satellite[mask_or_index],
            self.provenance if provenance is None else provenance,
        )


def convert_energy_to_power(s: GhiSeries) -> GhiSeries:
    """Turn 3-hour accumulated J/m2 into mean W/m2."""
    if s.unit is not Unit.JOULES_PER_SQM_ACCUM:
        raise DataError(f"series is already in {s.unit.value}; refusing to convert twice")
    return replace(s, unit=Unit.WATTS_PER_SQM, values=s.values / ACCUMULATION_SECONDS)


def shift_series(s: GhiSeries, k: int) -> GhiSeries:
    """Relabel the value at position ``i + k`` with the timestamp at ``i``.

    Positive ``k`` moves values to earlier timestamps; negative ``k`` to later
    ones.  The ``|k|`` samples left without a partner are dropped.
    """
    n = len(s)
    if abs(k) >= n:
        raise DataError(f"shifting a series of {n} samples by {k} steps leaves nothing")
    if k == 0:
        return s
    if k > 0:
        return replace(s, times=s.times[: n - k], values=s.values[k:])
    return replace(s, times=s.times[-k:], values=s.values[: n + k])


def _describe_span(s: GhiSeries) -> str:
    span = s.span()
    if span is None:
        return "empty"
    return f"{format_timestamp(span[0])} .. {format_timestamp(span[1])}"


def inner_join(ground: GhiSeries, satellite: GhiSeries) -> AlignedTable:
    for s in (ground, satellite):
        if s.unit is not Unit.WATTS_PER_SQM:
            raise DataError(f"{s.source.value} series must be in W/m2 before joining, got {s.unit.value}")
    common, gi, si = np.intersect1d(ground.times, satellite.times, assume_unique=True, return_indices=True)
    if common.size == 0:
        raise DataError(
            "ground and satellite series share no timestamps "
            f"(ground: {_describe_span(ground)}; satellite: {_describe_span(satellite)})"
        )
    return AlignedTable(
        common,
        ground.values[gi],
        satellite.values[si],
        Provenance(
            ground_unmatched=len(ground) - common.size,
            satellite_unmatched=len(satellite) - common.size,
        ),
    )
