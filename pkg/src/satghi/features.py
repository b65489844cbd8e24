"""Per-month design matrices: intercept, satellite GHI and one-hot calendar blocks.

Day-of-month and hour-of-day are reference coded: the smallest observed
level of each block is dropped so the intercept stays identifiable.
Column order is ``[intercept, sat_ghi, day=d..., hour=h...]`` with levels
ascending.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .align import MonthlyDataset
from .core import calendar_fields
from .errors import DataError


@dataclass(frozen=True)
class CategoryVocabulary:
    days: tuple[int, ...]
    hours: tuple[int, ...]

    def __post_init__(self):
        if not self.days or not self.hours:
            raise DataError("vocabulary blocks must be non-empty")
        if not set(self.days) <= set(range(1, 32)) or not set(self.hours) <= set(range(24)):
            raise DataError("day or hour level out of range")
        if list(self.days) != sorted(set(self.days)) or list(self.hours) != sorted(set(self.hours)):
            raise DataError("vocabulary levels must be sorted and distinct")

    @property
    def reference_day(self) -> int:
        return self.days[0]

    @property
    def reference_hour(self) -> int:
        return self.hours[0]

    @property
    def n_columns(self) -> int:
        return 2 + (len(self.days) - 1) + (len(self.hours) - 1)

    def column_labels(self) -> list[str]:
        return (
            ["intercept", "sat_ghi"]
            + [f"day={d}" for d in self.days[1:]]
            + [f"hour={h}" for h in self.hours[1:]]
        )


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]
    vocab: CategoryVocabulary


def build_vocabulary(m: MonthlyDataset) -> CategoryVocabulary:
    if len(m) == 0:
        raise DataError(f"cannot fit empty month {m.month}")
    _, _, day, hour = calendar_fields(m.table.times)
    return CategoryVocabulary(
        tuple(int(d) for d in np.unique(day)),
        tuple(int(h) for h in np.unique(hour)),
    )


def _encode(day: np.ndarray, hour: np.ndarray, sat: np.ndarray, v: CategoryVocabulary) -> np.ndarray:
    n = sat.shape[0]
    X = np.zeros((n, v.n_columns))
    X[:, 0] = 1.0
    X[:, 1] = sat
    offset = 2
    for levels, values in ((v.days, day), (v.hours, hour)):
        # levels[1:] -> columns offset.., reference and unseen levels stay all-zero
        for j, level in enumerate(levels[1:]):
            X[values == level, offset + j] = 1.0
        offset += len(levels) - 1
    return X


def encode_row(t: np.datetime64, sat_ghi: float, v: CategoryVocabulary) -> np.ndarray:
    _, _, day, hour = calendar_fields(np.array([t], dtype="datetime64[h]"))
    return _encode(day, hour, np.array([float(sat_ghi)]), v)[0]


def build_design_matrix(m: MonthlyDataset, vocab: CategoryVocabulary | None = None) -> DesignMatrix:
    vocab = vocab or build_vocabulary(m)
    _, _, day, hour = calendar_fields(m.table.times)
    X = _encode(day, hour, np.asarray(m.table.satellite), vocab)
    return DesignMatrix(X, np.array(m.table.ground), tuple(vocab.column_labels()), vocab)
