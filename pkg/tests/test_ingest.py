import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satghi.core import GhiSeries, Source, Unit
from satghi.errors import ParseError
from satghi.ingest import (
    StationMetadata,
    format_ground_csv,
    format_satellite_csv,
    parse_ground_csv,
    parse_satellite_csv,
    validate_csv,
    validate_series,
)

GROUND = """# lat=53.35,lon=-6.26,alt=20,tz=UTC
timestamp,ghi_w_m2
2020-06-01T12:00Z,750.0
"""


def test_parse_ground_example():
    station, s = parse_ground_csv(GROUND)
    assert (station.latitude, station.longitude, station.altitude, station.timezone) == (53.35, -6.26, 20.0, "UTC")
    assert s.source is Source.GROUND and s.unit is Unit.WATTS_PER_SQM
    assert s.times.tolist() == [np.datetime64("2020-06-01T12", "h").item()]
    assert s.values.tolist() == [750.0]


def test_parse_ground_negative_reports_line():
    text = GROUND.replace("750.0", "-5.0")
    with pytest.raises(ParseError, match="negative GHI at line 3") as err:
        parse_ground_csv(text)
    assert err.value.line == 3


def test_parse_ground_empty_body():
    with pytest.raises(ParseError, match="no samples"):
        parse_ground_csv("# lat=1,lon=2,alt=3\ntimestamp,ghi_w_m2\n")


@pytest.mark.parametrize(
    "row, message",
    [
        ("2020-06-01 12:00,1.0", "lacks a UTC designator"),
        ("2020-06-01T12:00+01:00,1.0", "not UTC"),
        ("2020-06-01T12:30Z,1.0", "not on the hour"),
        ("June 1st,1.0", "malformed timestamp"),
        ("2020-06-01T12:00Z,abc", "malformed value"),
        ("2020-06-01T12:00Z", "expected 2 columns"),
    ],
)
def test_parse_ground_bad_rows(row, message):
    text = "# lat=1,lon=2,alt=3\ntimestamp,ghi_w_m2\n" + row + "\n"
    with pytest.raises(ParseError, match=message):
        parse_ground_csv(text)


def test_parse_ground_missing_column_and_metadata():
    with pytest.raises(ParseError, match="expected header"):
        parse_ground_csv("# lat=1,lon=2,alt=3\ntimestamp\n2020-06-01T12:00Z\n")
    with pytest.raises(ParseError, match="missing metadata key 'alt'"):
        parse_ground_csv("# lat=1,lon=2\ntimestamp,ghi_w_m2\n2020-06-01T12:00Z,1\n")
    with pytest.raises(ParseError, match="latitude"):
        parse_ground_csv("# lat=100,lon=2,alt=0\ntimestamp,ghi_w_m2\n2020-06-01T12:00Z,1\n")


def test_parse_sorts_and_rejects_duplicates():
    text = "# lat=1,lon=2,alt=3\ntimestamp,ghi_w_m2\n2020-06-01T13:00Z,2\n2020-06-01T12:00Z,1\n"
    _, s = parse_ground_csv(text)
    assert s.values.tolist() == [1.0, 2.0]
    dup = text + "2020-06-01T12:00Z,9\n"
    with pytest.raises(ParseError, match="duplicate timestamp 2020-06-01T12:00Z at line 5"):
        parse_ground_csv(dup)


def test_parse_satellite_example():
    s = parse_satellite_csv("# unit=J_per_m2_3h\ntimestamp,ssrd\n2020-06-01T12:00Z,2700000\n")
    assert s.source is Source.SATELLITE
    assert s.unit is Unit.JOULES_PER_SQM_ACCUM
    assert s.values.tolist() == [2700000.0]


def test_parse_satellite_requires_unit():
    with pytest.raises(ParseError, match="unit declaration required"):
        parse_satellite_csv("timestamp,ssrd\n2020-06-01T12:00Z,1\n")
    with pytest.raises(ParseError, match="unknown unit"):
        parse_satellite_csv("# unit=kWh\ntimestamp,ssrd\n2020-06-01T12:00Z,1\n")
    with pytest.raises(ParseError, match="expected"):
        parse_satellite_csv("# unit=W_per_m2\ntimestamp,ssrd\n2020-06-01T12:00Z,1\n", Unit.JOULES_PER_SQM_ACCUM)


@pytest.mark.parametrize("value", ["NaN", "inf", "-inf"])
def test_parse_satellite_non_finite(value):
    with pytest.raises(ParseError, match="non-finite value at line 3"):
        parse_satellite_csv(f"# unit=W_per_m2\ntimestamp,ssrd\n2020-06-01T12:00Z,{value}\n")


def test_validate_gaps():
    def rep(offsets):
        t = np.datetime64("2020-01-01T00", "h") + np.array(offsets, dtype="timedelta64[h]")
        return validate_series(GhiSeries(Source.GROUND, Unit.WATTS_PER_SQM, t, np.zeros(len(offsets))))

    assert rep([0, 1, 2]).gap_count == 0
    assert rep([0, 2]).gap_count == 1
    empty = rep([])
    assert (empty.row_count, empty.gap_count, empty.span) == (0, 0, None)


def test_validate_csv_counts_duplicates_and_nonfinite():
    text = "# unit=W_per_m2\ntimestamp,ssrd\n2020-06-01T12:00Z,1\n2020-06-01T12:00Z,2\n2020-06-01T15:00Z,nan\n"
    rep = validate_csv(text)
    assert (rep.row_count, rep.duplicate_count, rep.gap_count, rep.nonfinite_count) == (3, 1, 2, 1)
    assert rep.span == ("2020-06-01T12:00Z", "2020-06-01T15:00Z")


finite_ghi = st.floats(0, 2000, allow_nan=False, allow_infinity=False)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 5000), finite_ghi), min_size=1, max_size=50, unique_by=lambda r: r[0]))
def test_roundtrip(rows):
    rows = sorted(rows)
    t = np.datetime64("2016-02-28T00", "h") + np.array([r[0] for r in rows], dtype="timedelta64[h]")
    g = GhiSeries(Source.GROUND, Unit.WATTS_PER_SQM, t, [r[1] for r in rows])
    station = StationMetadata(53.35, -6.26, 20.0, "Europe/Dublin")
    st2, g2 = parse_ground_csv(format_ground_csv(station, g))
    assert st2 == station
    np.testing.assert_array_equal(g2.times, g.times)
    np.testing.assert_array_equal(g2.values, g.values)

    s = GhiSeries(Source.SATELLITE, Unit.JOULES_PER_SQM_ACCUM, t, [r[1] * 10800 for r in rows])
    s2 = parse_satellite_csv(format_satellite_csv(s))
    assert s2.unit is s.unit
    np.testing.assert_array_equal(s2.values, s.values)
    assert validate_series(g2).gap_count == (rows[-1][0] - rows[0][0] + 1) - len(rows)
