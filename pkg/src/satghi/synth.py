"""Synthetic paired ground / satellite GHI with a known linear bias.

Ground irradiance follows a half-sine between sunrise and sunset, with
solar noon pinned at 12:00 UTC and a month-dependent peak.  The satellite
series is ``max(0, a * ground + b + noise)`` during daytime and exactly 0
at night, so the daylight filter sees the same structure as real data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ACCUMULATION_SECONDS, GhiSeries, Source, Unit, calendar_fields
from .errors import DataError
from .ingest import StationMetadata, format_ground_csv, format_satellite_csv
from .rng import XorShift64Star, mix_seed

# Rough clear-sky monthly noon peaks for a mid-latitude coastal site, W/m2.
DUBLIN_PEAKS = (220.0, 330.0, 480.0, 620.0, 720.0, 760.0, 740.0, 650.0, 520.0, 370.0, 250.0, 190.0)

DECLINATION_AMPLITUDE_DEG = 23.44
MAX_LATITUDE = 66.5

_CLOUD_STREAM = 101
_NOISE_STREAM = 202


@dataclass(frozen=True)
class SynthConfig:
    latitude: float = 53.35
    longitude: float = -6.26
    altitude: float = 20.0
    years: tuple[int, ...] = (2019, 2020)
    peak_ghi_by_month: tuple[float, ...] = DUBLIN_PEAKS
    bias_scale: float = 0.8
    bias_offset: float = -15.0
    noise_sigma: float = 0.0
    # extra noise sigma as a fraction of the month's peak
    noise_peak_fraction: float = 0.0
    # daytime ground values are scaled by (1 - cloudiness * U[0, 1)) per hour
    cloudiness: float = 0.0
    seed: int = 42

    def __post_init__(self):
        if len(self.peak_ghi_by_month) != 12 or min(self.peak_ghi_by_month) <= 0:
            raise DataError("peak_ghi_by_month needs 12 positive values")
        if self.noise_sigma < 0 or self.noise_peak_fraction < 0:
            raise DataError("noise must be non-negative")
        if not 0.0 <= self.cloudiness <= 1.0:
            raise DataError("cloudiness must lie in [0, 1]")
        if not self.years:
            raise DataError("at least one year is required")
        if abs(self.latitude) >= MAX_LATITUDE:
            raise DataError(f"latitude {self.latitude} is polar; |latitude| must be < {MAX_LATITUDE}")

    def station(self) -> StationMetadata:
        return StationMetadata(self.latitude, self.longitude, self.altitude, "UTC")

    def sigma_for_month(self, month: int) -> float:
        return self.noise_sigma + self.noise_peak_fraction * self.peak_ghi_by_month[month - 1]


def solar_declination(day_of_year: float) -> float:
    """Declination in degrees."""
    return DECLINATION_AMPLITUDE_DEG * math.sin(2.0 * math.pi * (284.0 + day_of_year) / 365.0)


def day_length(latitude: float, day_of_year: float) -> float:
    """Hours between sunrise and sunset from the sunrise equation."""
    if abs(latitude) >= MAX_LATITUDE:
        raise DataError(f"polar latitude {latitude} not supported")
    phi = math.radians(latitude)
    delta = math.radians(solar_declination(day_of_year))
    return (2.0 / 15.0) * math.degrees(math.acos(-math.tan(phi) * math.tan(delta)))


def hourly_times(years) -> np.ndarray:
    start = np.datetime64(f"{min(years)}-01-01T00", "h")
    stop = np.datetime64(f"{max(years) + 1}-01-01T00", "h")
    times = np.arange(start, stop, np.timedelta64(1, "h"))
    year, _, _, _ = calendar_fields(times)
    return times[np.isin(year, list(years))]


def generate_ground_series(c: SynthConfig) -> GhiSeries:
    times = hourly_times(c.years)
    _, month, _, hour = calendar_fields(times)
    days = times.astype("datetime64[D]")
    doy = (days - days.astype("datetime64[Y]").astype("datetime64[D]")).astype(np.int64) + 1
    lengths = {int(n): day_length(c.latitude, int(n)) for n in np.unique(doy)}
    H = np.array([lengths[int(n)] for n in doy])
    phase = (hour - (12.0 - H / 2.0)) / H
    peaks = np.asarray(c.peak_ghi_by_month)[month - 1]
    daytime = (phase > 0.0) & (phase < 1.0)
    values = np.where(daytime, peaks * np.sin(np.pi * np.clip(phase, 0.0, 1.0)), 0.0)
    if c.cloudiness > 0:
        rng = XorShift64Star(mix_seed(c.seed, _CLOUD_STREAM))
        u = np.array([rng.uniform() for _ in range(times.size)])
        values = values * (1.0 - c.cloudiness * u)
    return GhiSeries(Source.GROUND, Unit.WATTS_PER_SQM, times, np.maximum(values, 0.0))


def generate_satellite_series(ground: GhiSeries, c: SynthConfig) -> GhiSeries:
    if ground.unit is not Unit.WATTS_PER_SQM:
        raise DataError("ground series must be in W/m2")
    g = ground.values
    _, month, _, _ = calendar_fields(ground.times)
    rng = XorShift64Star(mix_seed(c.seed, _NOISE_STREAM))
    z = np.array([rng.normal() for _ in range(g.size)])
    sigma = np.array([c.sigma_for_month(m) for m in range(1, 13)])[month - 1]
    day = g > 0
    sat = np.where(day, np.maximum(0.0, c.bias_scale * g + c.bias_offset + sigma * z), 0.0)
    return GhiSeries(Source.SATELLITE, Unit.WATTS_PER_SQM, ground.times, sat)


def encode_reanalysis(satellite: GhiSeries, shift_steps: int = 2) -> GhiSeries:
    """Turn an aligned W/m2 satellite series into what the raw file would hold.

    Values are scaled to 3-hour accumulated J/m2 and displaced by
    ``shift_steps`` positions, so that ``shift_series(.., shift_steps)``
    followed by ``convert_energy_to_power`` restores the aligned values.
    Positions with no source value are filled with 0.
    """
    if satellite.unit is not Unit.WATTS_PER_SQM:
        raise DataError("expected a W/m2 satellite series")
    n, k = len(satellite), shift_steps
    if abs(k) >= n:
        raise DataError(f"cannot displace {n} samples by {k}")
    raw = satellite.values * ACCUMULATION_SECONDS
    out = np.zeros(n)
    if k >= 0:
        out[k:] = raw[: n - k]
    else:
        out[: n + k] = raw[-k:]
    return GhiSeries(Source.SATELLITE, Unit.JOULES_PER_SQM_ACCUM, satellite.times, out)


@dataclass(frozen=True)
class FixturePaths:
    ground: Path
    satellite: Path
    hours: int = field(default=0)


def write_fixtures(c: SynthConfig, out_dir: Path | str, shift_steps: int = 2) -> FixturePaths:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ground = generate_ground_series(c)
    sat = encode_reanalysis(generate_satellite_series(ground, c), shift_steps)
    paths = FixturePaths(out / "ground.csv", out / "satellite.csv", len(ground))
    paths.ground.write_text(format_ground_csv(c.station(), ground), encoding="utf-8")
    paths.satellite.write_text(format_satellite_csv(sat), encoding="utf-8")
    return paths
