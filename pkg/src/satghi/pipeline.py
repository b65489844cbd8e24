"""End-to-end run: files in, report directory out."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import align, report
from .core import Unit, convert_energy_to_power, inner_join, shift_series
from .errors import DataError, NumericalError, SatGhiError
from .ingest import parse_ground_csv, parse_satellite_csv
from .regression import MonthlyFits, fit_monthly_models

log = logging.getLogger(__name__)

SHIFT_SIGNS = {"earlier": 1, "later": -1}


@dataclass(frozen=True)
class RunConfig:
    ground_path: str
    satellite_path: str
    output_dir: str = "report"
    shift_steps: int = 2
    shift_sign: str = "earlier"
    epsilon: float = 0.0
    split_ratio: float = 0.8
    seed: int = 42
    workers: int = 1
    boxplot_month: int = 8

    def __post_init__(self):
        if not self.ground_path or not self.satellite_path:
            raise DataError("ground_path and satellite_path are required")
        if not 0.0 < self.split_ratio < 1.0:
            raise DataError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if self.shift_sign not in SHIFT_SIGNS:
            raise DataError(f"shift_sign must be one of {sorted(SHIFT_SIGNS)}")
        if self.shift_steps < 0:
            raise DataError("shift_steps must be >= 0; use shift_sign for direction")
        if self.epsilon < 0:
            raise DataError("epsilon must be >= 0")
        if not 1 <= self.boxplot_month <= 12:
            raise DataError("boxplot_month must be 1..12")

    @property
    def signed_shift(self) -> int:
        return SHIFT_SIGNS[self.shift_sign] * self.shift_steps

    @classmethod
    def from_sources(cls, file_values: dict | None = None, overrides: dict | None = None) -> "RunConfig":
        """Merge a config-file mapping with flag overrides; non-None flags win."""
        known = {f.name for f in fields(cls)}
        merged = dict(file_values or {})
        unknown = set(merged) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        missing = {"ground_path", "satellite_path"} - set(merged)
        if missing:
            raise DataError(f"missing required settings: {sorted(missing)}")
        return cls(**merged)


class StageError(SatGhiError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")

    @property
    def numerical(self) -> bool:
        return isinstance(self.cause, NumericalError)


class _stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        log.debug("stage %s", self.name)

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (SatGhiError, OSError)) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _read(path: str) -> tuple[str, str]:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"input file not found: {p}")
    data = p.read_bytes()
    return data.decode("utf-8"), hashlib.sha256(data).hexdigest()


@dataclass
class RunOutcome:
    manifest: dict
    fits: MonthlyFits


def run(config: RunConfig) -> RunOutcome:
    with _stage("ingest"):
        ground_text, ground_sha = _read(config.ground_path)
        sat_text, sat_sha = _read(config.satellite_path)
        _station, ground = parse_ground_csv(ground_text)
        satellite = parse_satellite_csv(sat_text)
    with _stage("convert"):
        if satellite.unit is Unit.JOULES_PER_SQM_ACCUM:
            satellite = convert_energy_to_power(satellite)
    with _stage("shift"):
        satellite = shift_series(satellite, config.signed_shift)
    with _stage("join"):
        joined = inner_join(ground, satellite)
    with _stage("filter"):
        daylight = align.filter_daylight(joined, config.epsilon)
    with _stage("stats"):
        times, diff = align.difference_series(joined)
        daily = align.daily_mean_difference(daylight)
        years = sorted({d.year for d in daily})
        stats = report.ReportStats(
            daily_diffs=daily,
            monthly_counts=align.monthly_counts(daylight),
            boxplots_by_year={y: report.monthly_diff_boxplots(daily, y) for y in years},
            cross_year={config.boxplot_month: report.cross_year_month_boxplots(daily, config.boxplot_month)},
        )
    with _stage("group"):
        months = align.group_by_month(daylight)
    with _stage("fit"):
        fits = fit_monthly_models(months, config.split_ratio, config.seed, config.workers)
        for month, reason in fits.skipped.items():
            log.warning("month %d skipped: %s", month, reason)
        if not fits.results:
            raise NumericalError("no month could be fitted")
    with _stage("report"):
        plots = stats.plots
        plots["ground_series"] = report.line_plot("Ground GHI", times, joined.ground, "ground")
        plots["satellite_series"] = report.line_plot("Satellite GHI", times, joined.satellite, "satellite")
        plots["difference_curve"] = report.line_plot("Ground minus satellite GHI", times, diff, "difference")
        for y, per_month in stats.boxplots_by_year.items():
            if per_month:
                plots[f"boxplots_{y}"] = report.monthly_boxplot_plot(f"Daily mean difference by month, {y}", per_month)
        for m, per_year in stats.cross_year.items():
            if per_year:
                title = f"Daily mean difference across years, {report.MONTH_NAMES[m - 1]}"
                plots[f"cross_year_month_{m:02d}"] = report.yearly_boxplot_plot(title, per_year)
        plots["monthly_counts"] = report.monthly_counts_plot(stats.monthly_counts)
        plots["r2_by_month"] = report.r2_bar_plot(fits.results)
        for r in fits.results:
            plots[f"scatter_month_{r.month:02d}"] = report.scatter_fit_export(months[r.month - 1], r)

        settings = {k: v for k, v in asdict(config).items() if k not in ("output_dir", "workers")}
        settings["ground_path"] = Path(config.ground_path).name
        settings["satellite_path"] = Path(config.satellite_path).name
        metadata = {
            "config": settings,
            "config_hash": hashlib.sha256(json.dumps(settings, sort_keys=True).encode()).hexdigest(),
            "inputs": {"ground_sha256": ground_sha, "satellite_sha256": sat_sha},
            "seed": config.seed,
            "provenance": asdict(daylight.provenance),
            "skipped_months": {str(k): v for k, v in sorted(fits.skipped.items())},
        }
        manifest = report.write_reports(fits.results, stats, config.output_dir, metadata)
    return RunOutcome(manifest, fits)
