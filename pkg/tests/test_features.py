import numpy as np
import pytest

from satghi.align import MonthlyDataset
from satghi.core import AlignedTable
from satghi.errors import DataError
from satghi.features import CategoryVocabulary, build_design_matrix, build_vocabulary, encode_row


def month_of(days, hours_, month=6, year=2020, sat=None):
    times = np.array(
        [np.datetime64(f"{year}-{month:02d}-{d:02d}T{h:02d}", "h") for d in days for h in hours_],
        dtype="datetime64[h]",
    )
    rng = np.random.default_rng(0)
    sat = rng.uniform(50, 500, times.size) if sat is None else np.full(times.size, float(sat))
    return MonthlyDataset(month, AlignedTable(times, sat * 1.2 + 10, sat), frozenset({year}))


def test_vocabulary_june():
    v = build_vocabulary(month_of(range(1, 31), range(5, 20)))
    assert (len(v.days), len(v.hours)) == (30, 15)
    assert (v.reference_day, v.reference_hour) == (1, 5)


def test_vocabulary_single_row():
    v = build_vocabulary(month_of([3], [12]))
    assert (v.days, v.hours) == ((3,), (12,))


def test_vocabulary_empty_month():
    empty = MonthlyDataset(2, AlignedTable(np.array([], dtype="datetime64[h]"), [], []), frozenset())
    with pytest.raises(DataError, match="cannot fit empty month"):
        build_vocabulary(empty)


def test_encode_reference_level():
    v = CategoryVocabulary((1, 2, 3), (10, 11))
    row = encode_row(np.datetime64("2020-06-01T10", "h"), 200.0, v)
    assert row.tolist() == [1, 200, 0, 0, 0]


def test_encode_definition():
    v = CategoryVocabulary((1, 2, 3), (10, 11))
    row = encode_row(np.datetime64("2020-06-02T11", "h"), 300.0, v)
    assert row.tolist() == [1, 300, 1, 0, 1]


def test_encode_unseen_is_zero_block():
    v = CategoryVocabulary((1, 2, 3), (10, 11))
    row = encode_row(np.datetime64("2020-06-20T04", "h"), 1.0, v)
    assert row.tolist() == [1, 1, 0, 0, 0]


def test_encode_length_40():
    v = CategoryVocabulary(tuple(range(1, 32)), tuple(range(8, 17)))
    assert encode_row(np.datetime64("2020-07-31T16", "h"), 1.0, v).size == 40


def test_design_matrix_shapes():
    dm = build_design_matrix(month_of([1], [10, 11]))
    assert dm.X.shape == (2, 3) and dm.y.shape == (2,)
    assert build_design_matrix(month_of([4], [9], sat=100)).X.shape[1] == 2
    june = build_design_matrix(month_of(range(1, 31), range(5, 20)))
    assert june.X.shape[1] == 2 + 29 + 14 == 45
    assert june.columns[:4] == ("intercept", "sat_ghi", "day=2", "day=3")
    assert june.columns[-1] == "hour=19"


def test_design_matrix_blocks_and_rank():
    m = month_of(range(1, 11), range(8, 16))
    dm = build_design_matrix(m)
    v = dm.vocab
    assert dm.X.shape[1] == v.n_columns == 2 + (len(v.days) - 1) + (len(v.hours) - 1)
    days_block = dm.X[:, 2 : 2 + len(v.days) - 1]
    hours_block = dm.X[:, 2 + len(v.days) - 1 :]
    assert set(np.unique(days_block)) <= {0.0, 1.0}
    assert set(days_block.sum(axis=1)) <= {0.0, 1.0}
    assert set(hours_block.sum(axis=1)) <= {0.0, 1.0}
    day_of_row = np.repeat(np.arange(1, 11), 8)
    np.testing.assert_array_equal(days_block.sum(axis=1) == 0, day_of_row == 1)
    np.testing.assert_array_equal(dm.y, m.table.ground)
    assert np.linalg.matrix_rank(dm.X) == dm.X.shape[1]
    full = np.column_stack([dm.X, (day_of_row == 1).astype(float)])
    assert np.linalg.matrix_rank(full) == dm.X.shape[1]
