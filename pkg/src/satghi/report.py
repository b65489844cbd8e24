"""Boxplot statistics, plot specifications, SVG rendering and report files.

Quartiles use linear interpolation between order statistics: for sorted
``x[0..n-1]`` and probability ``p``, ``h = (n - 1) p`` and
``Q(p) = x[floor(h)] + (h - floor(h)) (x[floor(h) + 1] - x[floor(h)])``.
Whiskers follow Tukey: they reach the most extreme data points within
``1.5 * IQR`` of the quartiles; anything beyond is an outlier.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .align import DailyMeanDiff, MonthlyDataset
from .errors import DataError
from .regression import FitResult, SplitIndices, fit_ols

WHISKER_REACH = 1.5

OVERLAY_NOTE = (
    "Scatter overlay lines are univariate ground ~ satellite least-squares fits on the "
    "training rows; the monthly models use additional day/hour features and have no 2-D line."
)

MONTH_NAMES = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")


@dataclass(frozen=True)
class BoxplotStats:
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    n: int


def _quantile(xs: np.ndarray, p: float) -> float:
    h = (xs.size - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, xs.size - 1)
    return float(xs[lo] + (h - lo) * (xs[hi] - xs[lo]))


def boxplot_stats(values) -> BoxplotStats:
    xs = np.sort(np.asarray(values, dtype=np.float64))
    if xs.size == 0:
        raise DataError("boxplot of an empty sample")
    q1, med, q3 = (_quantile(xs, p) for p in (0.25, 0.5, 0.75))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - WHISKER_REACH * iqr, q3 + WHISKER_REACH * iqr
    inside = xs[(xs >= lo_fence) & (xs <= hi_fence)]
    outliers = xs[(xs < lo_fence) | (xs > hi_fence)]
    return BoxplotStats(
        q1=q1,
        median=med,
        q3=q3,
        whisker_low=float(inside[0]) if inside.size else q1,
        whisker_high=float(inside[-1]) if inside.size else q3,
        outliers=tuple(float(v) for v in outliers),
        n=int(xs.size),
    )


def monthly_diff_boxplots(records: list[DailyMeanDiff], year: int) -> dict[int, BoxplotStats]:
    """Month -> stats over one year's daily mean differences; months without data are absent."""
    by_month: dict[int, list[float]] = {}
    for r in records:
        if r.year == year:
            by_month.setdefault(r.month, []).append(r.mean_diff)
    return {m: boxplot_stats(v) for m, v in sorted(by_month.items())}


def cross_year_month_boxplots(records: list[DailyMeanDiff], month: int) -> dict[int, BoxplotStats]:
    if not 1 <= month <= 12:
        raise DataError(f"month must be 1..12, got {month}")
    by_year: dict[int, list[float]] = {}
    for r in records:
        if r.month == month:
            by_year.setdefault(r.year, []).append(r.mean_diff)
    return {y: boxplot_stats(v) for y, v in sorted(by_year.items())}


# ---------------------------------------------------------------- plot specs


@dataclass(frozen=True)
class PlotSeries:
    label: str
    x: tuple
    y: tuple[float, ...]


@dataclass(frozen=True)
class PlotSpec:
    kind: str  # line | box | bar | scatter_with_line
    title: str
    x_label: str
    x_unit: str
    y_label: str
    y_unit: str
    series: tuple[PlotSeries, ...] = ()
    boxes: tuple[tuple[str, BoxplotStats], ...] = ()
    fit_line: tuple[float, float] | None = None  # (slope, intercept)

    def __post_init__(self):
        if self.kind not in ("line", "box", "bar", "scatter_with_line"):
            raise DataError(f"unknown plot kind {self.kind!r}")
        if not self.x_unit or not self.y_unit:
            raise DataError("axis units are required")
        if self.kind == "box":
            if not self.boxes:
                raise DataError("box plot without boxes")
        elif not self.series or any(len(s.y) == 0 or len(s.x) != len(s.y) for s in self.series):
            raise DataError("every plot series must be non-empty with matching x/y")
        if self.kind == "scatter_with_line" and self.fit_line is None:
            raise DataError("scatter_with_line needs a fit line")


def line_plot(title: str, times: np.ndarray, values: np.ndarray, label: str) -> PlotSpec:
    hours = (np.asarray(times, dtype="datetime64[h]") - np.datetime64("1970-01-01T00", "h")).astype(np.int64)
    return PlotSpec(
        "line", title, "time", "hours since 1970-01-01 UTC", "GHI", "W/m2",
        series=(PlotSeries(label, tuple(int(h) for h in hours), tuple(float(v) for v in values)),),
    )


def monthly_boxplot_plot(title: str, stats: dict[int, BoxplotStats]) -> PlotSpec:
    return PlotSpec(
        "box", title, "month", "month", "daily mean ground - satellite", "W/m2",
        boxes=tuple((MONTH_NAMES[m - 1], s) for m, s in sorted(stats.items())),
    )


def yearly_boxplot_plot(title: str, stats: dict[int, BoxplotStats]) -> PlotSpec:
    return PlotSpec(
        "box", title, "year", "year", "daily mean ground - satellite", "W/m2",
        boxes=tuple((str(y), s) for y, s in sorted(stats.items())),
    )


def monthly_counts_plot(counts: dict[int, int]) -> PlotSpec:
    return PlotSpec(
        "bar", "Daytime data points per month", "month", "month", "count", "rows",
        series=(PlotSeries("count", tuple(MONTH_NAMES), tuple(float(counts.get(m, 0)) for m in range(1, 13))),),
    )


def r2_bar_plot(results: list[FitResult]) -> PlotSpec:
    ordered = sorted(results, key=lambda r: r.month)
    return PlotSpec(
        "bar", "Test-set R2 per monthly model", "month", "month", "R2", "dimensionless",
        series=(PlotSeries("r2_test", tuple(MONTH_NAMES[r.month - 1] for r in ordered),
                           tuple(r.r2_test for r in ordered)),),
    )


def univariate_fit(x, y) -> tuple[float, float]:
    """(slope, intercept) of ``y ~ x`` by least squares."""
    x = np.asarray(x, dtype=np.float64)
    X = np.column_stack([np.ones_like(x), x])
    coef = fit_ols(X, np.asarray(y, dtype=np.float64)).coef
    return float(coef[1]), float(coef[0])


def scatter_fit_export(m: MonthlyDataset, f: FitResult, split: SplitIndices | None = None) -> PlotSpec:
    split = split or f.split
    n = len(m)
    if f.month != m.month or len(split.train) + len(split.test) != n or (split.test and max(split.test) >= n):
        raise DataError(f"fit for month {f.month} does not match dataset for month {m.month} ({n} rows)")
    if not split.test:
        raise DataError("scatter export needs a non-empty test set")
    train, test = np.array(split.train), np.array(split.test)
    slope, intercept = univariate_fit(m.table.satellite[train], m.table.ground[train])
    return PlotSpec(
        "scatter_with_line",
        f"{MONTH_NAMES[m.month - 1]}: test-set satellite vs ground",
        "satellite GHI", "W/m2", "ground GHI", "W/m2",
        series=(PlotSeries("test", tuple(float(v) for v in m.table.satellite[test]),
                           tuple(float(v) for v in m.table.ground[test])),),
        fit_line=(slope, intercept),
    )


# ---------------------------------------------------------------- SVG

_W, _H = 800, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Axes:
    def __init__(self, lo: float, hi: float, y_lo: float, y_hi: float):
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        self.lo, self.hi, self.y_lo, self.y_hi = lo, hi, y_lo, y_hi

    def x(self, v: float) -> float:
        return _ML + (v - self.lo) / (self.hi - self.lo) * (_W - _ML - _MR)

    def y(self, v: float) -> float:
        return _H - _MB - (v - self.y_lo) / (self.y_hi - self.y_lo) * (_H - _MT - _MB)


def _text(x: float, y: float, s: str, anchor: str = "middle", size: int = 12) -> str:
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" text-anchor="{anchor}">{escape(s)}</text>'


def _frame(p: PlotSpec, ax: _Axes) -> list[str]:
    x0, x1, y0, y1 = _ML, _W - _MR, _H - _MB, _MT
    return [
        _text(_W / 2, 24, p.title, size=15),
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        _text(_W / 2, _H - 12, f"{p.x_label} [{p.x_unit}]"),
        f'<text x="16" y="{_H / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {_H / 2:.2f})">{escape(f"{p.y_label} [{p.y_unit}]")}</text>',
        _text(x0 - 6, y0 + 4, f"{ax.y_lo:.4g}", anchor="end", size=10),
        _text(x0 - 6, y1 + 4, f"{ax.y_hi:.4g}", anchor="end", size=10),
    ]


def _categorical(labels, ax: _Axes) -> list[str]:
    return [_text(ax.x(i + 0.5), _H - _MB + 16, str(lab), size=10) for i, lab in enumerate(labels)]


def render_svg(p: PlotSpec) -> str:
    body: list[str] = []
    if p.kind == "bar":
        s = p.series[0]
        ys = [0.0, *s.y]
        ax = _Axes(0.0, float(len(s.y)), min(ys), max(ys))
        body += _frame(p, ax) + _categorical(s.x, ax)
        base = ax.y(0.0)
        for i, v in enumerate(s.y):
            top = ax.y(v)
            body.append(
                f'<rect x="{_fmt(ax.x(i + 0.1))}" y="{_fmt(min(top, base))}" '
                f'width="{_fmt(ax.x(i + 0.9) - ax.x(i + 0.1))}" height="{_fmt(abs(base - top))}" fill="steelblue"/>'
            )
    elif p.kind == "box":
        lo = min(min(b.whisker_low, *b.outliers) if b.outliers else b.whisker_low for _, b in p.boxes)
        hi = max(max(b.whisker_high, *b.outliers) if b.outliers else b.whisker_high for _, b in p.boxes)
        ax = _Axes(0.0, float(len(p.boxes)), lo, hi)
        body += _frame(p, ax) + _categorical([lab for lab, _ in p.boxes], ax)
        for i, (_, b) in enumerate(p.boxes):
            cx, left, right = ax.x(i + 0.5), ax.x(i + 0.25), ax.x(i + 0.75)
            body.append(
                f'<line x1="{_fmt(cx)}" y1="{_fmt(ax.y(b.whisker_low))}" x2="{_fmt(cx)}" '
                f'y2="{_fmt(ax.y(b.whisker_high))}" stroke="black"/>'
            )
            body.append(
                f'<rect x="{_fmt(left)}" y="{_fmt(ax.y(b.q3))}" width="{_fmt(right - left)}" '
                f'height="{_fmt(ax.y(b.q1) - ax.y(b.q3))}" fill="white" stroke="black"/>'
            )
            body.append(
                f'<line x1="{_fmt(left)}" y1="{_fmt(ax.y(b.median))}" x2="{_fmt(right)}" '
                f'y2="{_fmt(ax.y(b.median))}" stroke="firebrick" stroke-width="2"/>'
            )
            body += [f'<circle cx="{_fmt(cx)}" cy="{_fmt(ax.y(o))}" r="2" fill="none" stroke="black"/>'
                     for o in b.outliers]
    else:
        xs = [float(v) for s in p.series for v in s.x]
        ys = [float(v) for s in p.series for v in s.y]
        ax = _Axes(min(xs), max(xs), min(ys), max(ys))
        body += _frame(p, ax)
        body.append(_text(_ML, _H - _MB + 16, f"{ax.lo:.6g}", anchor="start", size=10))
        body.append(_text(_W - _MR, _H - _MB + 16, f"{ax.hi:.6g}", anchor="end", size=10))
        for s in p.series:
            if p.kind == "line":
                pts = " ".join(f"{_fmt(ax.x(float(x)))},{_fmt(ax.y(y))}" for x, y in zip(s.x, s.y))
                body.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="0.5"/>')
            else:
                body += [f'<circle cx="{_fmt(ax.x(float(x)))}" cy="{_fmt(ax.y(y))}" r="1.5" fill="steelblue"/>'
                         for x, y in zip(s.x, s.y)]
        if p.fit_line is not None:
            slope, intercept = p.fit_line
            body.append(
                f'<line x1="{_fmt(ax.x(ax.lo))}" y1="{_fmt(ax.y(intercept + slope * ax.lo))}" '
                f'x2="{_fmt(ax.x(ax.hi))}" y2="{_fmt(ax.y(intercept + slope * ax.hi))}" '
                f'stroke="firebrick" stroke-width="2"/>'
            )
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


# ---------------------------------------------------------------- files


@dataclass
class ReportStats:
    """Everything besides the model fits that ends up in the report directory."""

    daily_diffs: list[DailyMeanDiff] = field(default_factory=list)
    monthly_counts: dict[int, int] = field(default_factory=dict)
    boxplots_by_year: dict[int, dict[int, BoxplotStats]] = field(default_factory=dict)
    cross_year: dict[int, dict[int, BoxplotStats]] = field(default_factory=dict)
    plots: dict[str, PlotSpec] = field(default_factory=dict)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _box_rows(key_name: str, stats: dict[int, BoxplotStats]):
    header = [key_name, "n", "q1", "median", "q3", "whisker_low", "whisker_high", "n_outliers", "outliers"]
    rows = [
        [k, s.n, repr(s.q1), repr(s.median), repr(s.q3), repr(s.whisker_low), repr(s.whisker_high),
         len(s.outliers), ";".join(repr(o) for o in s.outliers)]
        for k, s in sorted(stats.items())
    ]
    return header, rows


def model_record(r: FitResult, seed: int | None = None) -> dict:
    return {
        "month": r.month,
        "columns": list(r.columns),
        "coefficients": list(r.coefficients),
        "r2_train": r.r2_train,
        "r2_test": r.r2_test,
        "n_train": r.n_train,
        "n_test": r.n_test,
        "residual_mean": r.residual_mean,
        "residual_max_abs": r.residual_max_abs,
        "normal_equation_residual": r.normal_residual,
        "rank": r.rank,
        "seed": seed,
        "split_seed": r.split.seed,
        "split_ratio": r.split.ratio,
        "warning": r.warning,
    }


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_reports(
    results: list[FitResult],
    stats: ReportStats | None,
    out_dir: Path | str,
    metadata: dict | None = None,
) -> dict:
    """Write models, statistics and figures under ``out_dir`` and return the manifest.

    The manifest lists every file with its SHA-256; it carries no wall-clock
    time, so identical inputs give byte-identical trees.
    """
    stats = stats or ReportStats()
    metadata = dict(metadata or {})
    files: dict[str, str] = {}

    seed = metadata.get("seed")
    for r in sorted(results, key=lambda r: r.month):
        files[f"models/month_{r.month:02d}.json"] = _json_text(model_record(r, seed))
    if results:
        files["stats/r2_by_month.csv"] = _csv_text(
            ["month", "r2_train", "r2_test", "n_train", "n_test"],
            [[r.month, repr(r.r2_train), repr(r.r2_test), r.n_train, r.n_test]
             for r in sorted(results, key=lambda r: r.month)],
        )
    if stats.daily_diffs:
        files["stats/daily_diff.csv"] = _csv_text(
            ["date", "year", "month", "mean_diff_w_m2", "n"],
            [[str(d.date), d.year, d.month, repr(d.mean_diff), d.n] for d in stats.daily_diffs],
        )
    for year, per_month in sorted(stats.boxplots_by_year.items()):
        files[f"stats/boxplots_{year}.csv"] = _csv_text(*_box_rows("month", per_month))
    for month, per_year in sorted(stats.cross_year.items()):
        files[f"stats/cross_year_month_{month:02d}.csv"] = _csv_text(*_box_rows("year", per_year))
    if stats.monthly_counts:
        files["stats/monthly_counts.csv"] = _csv_text(
            ["month", "count"], [[m, stats.monthly_counts.get(m, 0)] for m in range(1, 13)]
        )
    overlays = [(name, spec.fit_line) for name, spec in sorted(stats.plots.items()) if spec.fit_line]
    if overlays:
        files["stats/overlay_lines.csv"] = _csv_text(
            ["figure", "slope", "intercept"], [[name, repr(sl), repr(ic)] for name, (sl, ic) in overlays]
        )
    for name, spec in sorted(stats.plots.items()):
        files[f"figures/{name}.svg"] = render_svg(spec)

    root = Path(out_dir)
    artifacts = []
    try:
        for rel, text in sorted(files.items()):
            path = root / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            data = text.encode("utf-8")
            path.write_bytes(data)
            artifacts.append({"path": rel, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
        manifest = {
            "format_version": 1,
            "metadata": metadata,
            "notes": [OVERLAY_NOTE] if any(s.kind == "scatter_with_line" for s in stats.plots.values()) else [],
            "artifacts": artifacts,
        }
        root.mkdir(parents=True, exist_ok=True)
        (root / "manifest.json").write_text(_json_text(manifest), encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write reports to {root}: {exc}") from exc
    return manifest

