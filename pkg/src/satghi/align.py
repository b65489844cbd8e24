"""Difference series, daylight filtering and month-wise pooling."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import AlignedTable, calendar_fields
from .errors import DataError


@dataclass(frozen=True)
class MonthlyDataset:
    """All aligned rows of one calendar month, pooled over the years."""

    month: int
    table: AlignedTable
    years_present: frozenset[int]

    def __len__(self) -> int:
        return len(self.table)


@dataclass(frozen=True)
class DailyMeanDiff:
    date: np.datetime64  # datetime64[D]
    mean_diff: float
    n: int

    @property
    def year(self) -> int:
        return int(self.date.astype("datetime64[Y]").astype(np.int64)) + 1970

    @property
    def month(self) -> int:
        return int(self.date.astype("datetime64[M]").astype(np.int64)) % 12 + 1


def difference_series(t: AlignedTable) -> tuple[np.ndarray, np.ndarray]:
    """Ground minus satellite; positive means the satellite underestimates."""
    return t.times, t.ground - t.satellite


def filter_daylight(t: AlignedTable, epsilon: float = 0.0) -> AlignedTable:
    """Keep rows where both readings exceed ``epsilon``."""
    if not epsilon >= 0:
        raise DataError(f"epsilon must be >= 0, got {epsilon}")
    keep = (t.ground > epsilon) & (t.satellite > epsilon)
    dropped = len(t) - int(np.count_nonzero(keep))
    prov = replace(t.provenance, daylight_dropped=t.provenance.daylight_dropped + dropped)
    return t.take(keep, prov)


def daily_mean_difference(t: AlignedTable) -> list[DailyMeanDiff]:
    days = t.times.astype("datetime64[D]")
    diff = t.ground - t.satellite
    unique, inverse, counts = np.unique(days, return_inverse=True, return_counts=True)
    sums = np.zeros(unique.size)
    np.add.at(sums, inverse, diff)
    return [
        DailyMeanDiff(d, float(s / c), int(c))
        for d, s, c in zip(unique, sums, counts)
    ]


def group_by_month(t: AlignedTable) -> list[MonthlyDataset]:
    """Split into 12 datasets (index 0 is January); years are pooled."""
    year, month, _, _ = calendar_fields(t.times)
    out = []
    for m in range(1, 13):
        mask = month == m
        out.append(MonthlyDataset(m, t.take(mask), frozenset(int(y) for y in np.unique(year[mask]))))
    return out


def monthly_counts(t: AlignedTable) -> dict[int, int]:
    _, month, _, _ = calendar_fields(t.times)
    counts = np.bincount(month, minlength=13)
    return {m: int(counts[m]) for m in range(1, 13)}
