"""Reading and writing the ground / satellite CSV conventions.

Ground file::

    # lat=53.35
    # lon=-6.26
    # alt=20
    # tz=Europe/Dublin
    timestamp,ghi_w_m2
    2020-06-01T12:00Z,750.0

Satellite file::

    # unit=J_per_m2_3h
    timestamp,ssrd
    2020-06-01T12:00Z,2700000

Comment lines may hold several comma-separated ``key=value`` pairs.
Timestamps must carry a UTC designator (``Z`` or ``+00:00``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .core import GhiSeries, Source, Unit, format_timestamp, hour_from_datetime
from .errors import DataError, ParseError

GROUND_HEADER = ("timestamp", "ghi_w_m2")
SATELLITE_HEADER = ("timestamp", "ssrd")


@dataclass(frozen=True)
class StationMetadata:
    latitude: float
    longitude: float
    altitude: float
    timezone: str = "UTC"

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise DataError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise DataError(f"longitude {self.longitude} outside [-180, 180]")
        if not math.isfinite(self.altitude):
            raise DataError("altitude must be finite")


@dataclass(frozen=True)
class ValidationReport:
    row_count: int
    gap_count: int
    duplicate_count: int
    nonfinite_count: int
    span: tuple[str, str] | None

    def lines(self) -> list[str]:
        first, last = self.span if self.span else ("-", "-")
        return [
            f"rows:        {self.row_count}",
            f"gaps:        {self.gap_count}",
            f"duplicates:  {self.duplicate_count}",
            f"non-finite:  {self.nonfinite_count}",
            f"span:        {first} .. {last}",
        ]


def parse_timestamp(text: str, line: int | None = None) -> np.datetime64:
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError:
        raise ParseError(f"malformed timestamp {text.strip()!r}", line) from None
    if dt.tzinfo is None:
        raise ParseError(f"timestamp {text.strip()!r} lacks a UTC designator", line)
    try:
        return hour_from_datetime(dt)
    except DataError as exc:
        raise ParseError(str(exc), line) from None


def _split(content: str, headers: tuple[tuple[str, str], ...]):
    """Return the metadata dict and the raw (line_no, ts, value) rows."""
    meta: dict[str, str] = {}
    rows: list[tuple[int, str, str]] = []
    seen_header = False
    for line_no, line in enumerate(content.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for pair in stripped[1:].split(","):
                if "=" in pair:
                    key, value = pair.split("=", 1)
                    meta[key.strip().lower()] = value.strip()
            continue
        cells = [c.strip() for c in stripped.split(",")]
        if not seen_header:
            if tuple(c.lower() for c in cells) not in headers:
                raise ParseError(f"expected header {','.join(headers[0])!r}, found {stripped!r}", line_no)
            seen_header = True
            continue
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, found {len(cells)}", line_no)
        rows.append((line_no, cells[0], cells[1]))
    if not seen_header:
        raise ParseError(f"missing header {','.join(headers[0])!r}")
    return meta, rows


def _series_from_rows(rows, source: Source, unit: Unit) -> GhiSeries:
    if not rows:
        raise ParseError("no samples")
    times = np.empty(len(rows), dtype="datetime64[h]")
    values = np.empty(len(rows), dtype=np.float64)
    for i, (line_no, ts, val) in enumerate(rows):
        times[i] = parse_timestamp(ts, line_no)
        try:
            v = float(val)
        except ValueError:
            raise ParseError(f"malformed value {val!r}", line_no) from None
        if not math.isfinite(v):
            raise ParseError("non-finite value", line_no)
        if v < 0:
            raise ParseError("negative GHI", line_no)
        values[i] = v

    order = np.argsort(times, kind="stable")
    times, values = times[order], values[order]
    dup = np.flatnonzero(times[1:] == times[:-1])
    if dup.size:
        line_no = rows[order[dup[0] + 1]][0]
        raise ParseError(f"duplicate timestamp {format_timestamp(times[dup[0]])}", line_no)
    return GhiSeries(source, unit, times, values)


def _float_meta(meta: dict[str, str], key: str) -> float:
    if key not in meta:
        raise ParseError(f"missing metadata key {key!r}")
    try:
        return float(meta[key])
    except ValueError:
        raise ParseError(f"metadata {key}={meta[key]!r} is not a number") from None


def parse_ground_csv(content: str) -> tuple[StationMetadata, GhiSeries]:
    meta, rows = _split(content, (GROUND_HEADER,))
    try:
        station = StationMetadata(
            latitude=_float_meta(meta, "lat"),
            longitude=_float_meta(meta, "lon"),
            altitude=_float_meta(meta, "alt"),
            timezone=meta.get("tz", "UTC"),
        )
    except DataError as exc:
        raise ParseError(str(exc)) from None
    return station, _series_from_rows(rows, Source.GROUND, Unit.WATTS_PER_SQM)


def parse_satellite_csv(content: str, unit: Unit | None = None) -> GhiSeries:
    """Parse a satellite file; values keep the unit declared in its header.

    ``unit``, when given, must agree with the header declaration.
    """
    meta, rows = _split(content, (SATELLITE_HEADER,))
    if "unit" not in meta:
        raise ParseError("unit declaration required (# unit=J_per_m2_3h or # unit=W_per_m2)")
    try:
        declared = Unit(meta["unit"])
    except ValueError:
        raise ParseError(f"unknown unit {meta['unit']!r}") from None
    if unit is not None and unit is not declared:
        raise ParseError(f"file declares {declared.value} but {unit.value} was expected")
    return _series_from_rows(rows, Source.SATELLITE, declared)


def _format_value(v: float) -> str:
    return repr(float(v))


def _body(series: GhiSeries) -> list[str]:
    return [f"{format_timestamp(t)},{_format_value(v)}" for t, v in zip(series.times, series.values)]


def format_ground_csv(station: StationMetadata, series: GhiSeries) -> str:
    lines = [
        f"# lat={station.latitude!r}",
        f"# lon={station.longitude!r}",
        f"# alt={station.altitude!r}",
        f"# tz={station.timezone}",
        ",".join(GROUND_HEADER),
        *_body(series),
    ]
    return "\n".join(lines) + "\n"


def format_satellite_csv(series: GhiSeries) -> str:
    lines = [f"# unit={series.unit.value}", ",".join(SATELLITE_HEADER), *_body(series)]
    return "\n".join(lines) + "\n"


def validate_series(s: GhiSeries) -> ValidationReport:
    """Summarize a series without modifying it."""
    times = np.asarray(s.times, dtype="datetime64[h]")
    values = np.asarray(s.values, dtype=np.float64)
    n = int(times.size)
    if n == 0:
        return ValidationReport(0, 0, 0, 0, None)
    ordered = np.sort(times)
    unique = np.unique(ordered)
    duplicates = n - unique.size
    span_hours = int((unique[-1] - unique[0]) / np.timedelta64(1, "h")) + 1
    return ValidationReport(
        row_count=n,
        gap_count=span_hours - int(unique.size),
        duplicate_count=int(duplicates),
        nonfinite_count=int(np.count_nonzero(~np.isfinite(values))),
        span=(format_timestamp(ordered[0]), format_timestamp(ordered[-1])),
    )


def validate_csv(content: str) -> ValidationReport:
    """Lenient scan of either CSV flavor, reporting duplicates and gaps instead of failing on them."""
    _, rows = _split(content, (GROUND_HEADER, SATELLITE_HEADER))
    times = np.empty(len(rows), dtype="datetime64[h]")
    values = np.empty(len(rows), dtype=np.float64)
    for i, (line_no, ts, val) in enumerate(rows):
        times[i] = parse_timestamp(ts, line_no)
        try:
            values[i] = float(val)
        except ValueError:
            raise ParseError(f"malformed value {val!r}", line_no) from None
    return validate_series(_RawSeries(times, values))


@dataclass(frozen=True)
class _RawSeries:
    times: np.ndarray
    values: np.ndarray

