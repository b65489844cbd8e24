import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satghi.align import MonthlyDataset
from satghi.core import AlignedTable
from satghi.errors import DataError, NumericalError
from satghi.features import build_design_matrix
from satghi.regression import (
    fit_monthly_models,
    fit_ols,
    normal_equation_residual,
    predict,
    r_squared,
    train_test_split,
)


def normal_equations(X, y):
    """Independent oracle: solve X^T X b = X^T y directly."""
    return np.linalg.solve(X.T @ X, X.T @ y)


# ---------------------------------------------------------------- split


def test_split_sizes():
    s = train_test_split(10, 0.8, 1)
    assert (len(s.train), len(s.test)) == (8, 2)
    s5 = train_test_split(5, 0.8, 1)
    assert (len(s5.train), len(s5.test)) == (4, 1)


def test_split_deterministic_and_partition():
    a, b = train_test_split(137, 0.8, 9), train_test_split(137, 0.8, 9)
    assert a == b
    assert sorted(a.train + a.test) == list(range(137))
    assert len(a.train) == round(0.8 * 137)
    assert train_test_split(137, 0.8, 10) != a


def test_split_errors():
    with pytest.raises(DataError, match="month too small to split"):
        train_test_split(4, 0.8, 0)
    with pytest.raises(DataError):
        train_test_split(10, 1.0, 0)
    with pytest.raises(DataError, match="empty partition"):
        train_test_split(5, 0.95, 0)


@given(st.integers(5, 3000), st.floats(0.3, 0.85), st.integers(0, 2**63))
def test_split_round_half_up(n, ratio, seed):
    s = train_test_split(n, ratio, seed)
    assert len(s.train) == int(np.floor(ratio * n + 0.5))
    assert set(s.train).isdisjoint(s.test)
    assert len(s.train) + len(s.test) == n


# ---------------------------------------------------------------- OLS


def test_ols_identity():
    sol = fit_ols([[1, 0], [0, 1]], [3, 4])
    np.testing.assert_allclose(sol.coef, [3, 4], rtol=0, atol=1e-14)
    assert sol.rank == 2 and sol.warning is None


def test_ols_hand_normal_equations():
    # X^T X = [[3, 6], [6, 14]], X^T y = [12, 28]  ->  b = [0, 2]
    sol = fit_ols([[1, 1], [1, 2], [1, 3]], [2, 4, 6])
    np.testing.assert_allclose(sol.coef, [0, 2], atol=1e-12)


def test_ols_duplicated_column():
    rng = np.random.default_rng(3)
    x = rng.normal(size=20)
    X = np.column_stack([np.ones(20), x, x])
    y = 1 + 2 * x
    sol = fit_ols(X, y)
    assert sol.rank == 2
    assert sol.rank_deficient and "rank deficient" in sol.warning
    assert np.count_nonzero(sol.coef == 0.0) == 1
    np.testing.assert_allclose(X @ sol.coef, y, atol=1e-10)
    np.testing.assert_allclose(sol.coef[0], 1.0, atol=1e-10)
    np.testing.assert_allclose(sol.coef[1] + sol.coef[2], 2.0, atol=1e-10)


def test_ols_errors():
    with pytest.raises(NumericalError, match="underdetermined"):
        fit_ols(np.ones((2, 3)), [1, 2])
    with pytest.raises(NumericalError, match="non-finite"):
        fit_ols([[1, 0], [0, np.nan]], [1, 2])
    with pytest.raises(DataError):
        fit_ols(np.ones((3, 2)), [1, 2])


def test_ols_matches_oracle_random():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        p = int(rng.integers(1, 9))
        n = int(rng.integers(p + 2, 201))
        X = rng.normal(size=(n, p)) * rng.uniform(0.5, 10, size=p)
        y = X @ rng.normal(size=p) + rng.normal(size=n)
        got = fit_ols(X, y).coef
        want = normal_equations(X, y)
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-10 * np.abs(want).max())
        assert normal_equation_residual(X, y, got) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ols_residual_orthogonal(seed):
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(10, 80)), int(rng.integers(1, 8))
    X = rng.normal(size=(n, p))
    y = rng.normal(size=n) * 100
    b = fit_ols(X, y).coef
    r = y - predict(b, X)
    assert np.abs(X.T @ r).max() <= 1e-8 * (1 + np.abs(X.T @ y).max())


def test_predict():
    assert predict(np.zeros(3), np.ones((4, 3))).tolist() == [0.0] * 4
    assert predict([3, 4], np.eye(2)).tolist() == [3.0, 4.0]
    with pytest.raises(DataError):
        predict([1, 2, 3], np.eye(2))


# ---------------------------------------------------------------- R2


def test_r2_examples():
    y = np.array([1.0, 2.0, 3.0])
    assert r_squared(y, y) == 1.0
    assert r_squared(y, np.full(3, y.mean())) == 0.0
    assert r_squared(y, [1.0, 2.0, 4.0]) == pytest.approx(0.5, abs=1e-15)
    assert r_squared(y, [3.0, 2.0, 1.0]) < 0


def test_r2_errors():
    with pytest.raises(NumericalError, match="zero total variance"):
        r_squared([2.0, 2.0], [1.0, 3.0])
    with pytest.raises(NumericalError):
        r_squared([1.0], [1.0])
    with pytest.raises(DataError):
        r_squared([1.0, 2.0], [1.0])


# ---------------------------------------------------------------- monthly fits


def synthetic_month(month, noise=0.0, seed=0, days=range(1, 29), hours=range(7, 18)):
    """Ground is an exact linear function of the design columns plus optional noise."""
    rng = np.random.default_rng(seed + month)
    times = np.array(
        [np.datetime64(f"2020-{month:02d}-{d:02d}T{h:02d}", "h") for d in days for h in hours],
        dtype="datetime64[h]",
    )
    sat = rng.uniform(20, 600, times.size)
    placeholder = MonthlyDataset(month, AlignedTable(times, sat, sat), frozenset({2020}))
    X = build_design_matrix(placeholder).X
    beta = rng.normal(0, 20, X.shape[1])
    beta[1] = 1.25
    ground = X @ beta + noise * rng.normal(size=times.size)
    return MonthlyDataset(month, AlignedTable(times, ground, sat), frozenset({2020})), beta


def test_fit_monthly_all_months_noiseless():
    datasets = [synthetic_month(m)[0] for m in range(1, 13)]
    fits = fit_monthly_models(datasets, 0.8, 42)
    assert [r.month for r in fits.results] == list(range(1, 13))
    for r, (_, beta) in zip(fits.results, (synthetic_month(m) for m in range(1, 13))):
        assert r.r2_test == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(r.coefficients, beta, rtol=1e-7, atol=1e-7)
        assert 0.0 <= r.r2_train <= 1.0
        assert r.normal_residual < 1e-8
        assert len(r.coefficients) == len(r.columns)


def test_fit_monthly_skips_empty_month():
    datasets = [synthetic_month(m)[0] for m in range(1, 13)]
    empty = MonthlyDataset(2, AlignedTable(np.array([], dtype="datetime64[h]"), [], []), frozenset())
    datasets[1] = empty
    fits = fit_monthly_models(datasets)
    assert len(fits.results) == 11
    assert list(fits.skipped) == [2]


def test_fit_monthly_subseed_independent_of_other_months():
    datasets = [synthetic_month(m, noise=5)[0] for m in range(1, 13)]
    full = fit_monthly_models(datasets, seed=7).by_month()
    partial = fit_monthly_models(datasets[5:6], seed=7).by_month()
    assert partial[6] == full[6]


def test_parallel_matches_sequential():
    datasets = [synthetic_month(m, noise=10)[0] for m in range(1, 13)]
    seq = fit_monthly_models(datasets, seed=3, workers=1)
    par = fit_monthly_models(datasets, seed=3, workers=6)
    assert seq.results == par.results
    assert seq.skipped == par.skipped


def test_noise_monotonically_lowers_median_r2():
    medians = []
    for sigma in (0.0, 10.0, 40.0, 120.0):
        r2 = [
            fit_monthly_models([synthetic_month(6, noise=sigma, seed=s)[0]], seed=s).results[0].r2_test
            for s in range(7)
        ]
        medians.append(float(np.median(r2)))
    assert all(a >= b for a, b in zip(medians, medians[1:])), medians


def test_fit_speed_small():
    datasets = [synthetic_month(m, noise=5)[0] for m in range(1, 13)]
    start = time.perf_counter()
    fit_monthly_models(datasets)
    assert time.perf_counter() - start < 5.0
