"""Seeded 80/20 splits, pivoted-QR least squares and R2, one model per month."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .align import MonthlyDataset
from .errors import DataError, NumericalError
from .features import build_design_matrix
from .rng import XorShift64Star, mix_seed

MIN_SPLIT_ROWS = 5


@dataclass(frozen=True)
class SplitIndices:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    ratio: float


@dataclass(frozen=True)
class LstsqSolution:
    coef: np.ndarray
    rank: int
    pivot: tuple[int, ...]
    warning: str | None = None

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.coef.size


@dataclass(frozen=True)
class FitResult:
    month: int
    columns: tuple[str, ...]
    coefficients: tuple[float, ...]
    r2_train: float
    r2_test: float
    n_train: int
    n_test: int
    residual_mean: float
    residual_max_abs: float
    normal_residual: float
    rank: int
    split: SplitIndices
    warning: str | None = None


@dataclass
class MonthlyFits:
    results: list[FitResult] = field(default_factory=list)
    skipped: dict[int, str] = field(default_factory=dict)

    def by_month(self) -> dict[int, FitResult]:
        return {r.month: r for r in self.results}


def train_test_split(n: int, ratio: float = 0.8, seed: int = 42) -> SplitIndices:
    """Shuffle ``range(n)`` with the pinned generator and cut at round-half-up(ratio * n)."""
    if n < MIN_SPLIT_ROWS:
        raise DataError(f"month too small to split ({n} rows, need {MIN_SPLIT_ROWS})")
    if not 0.0 < ratio < 1.0:
        raise DataError(f"split ratio must lie in (0, 1), got {ratio}")
    n_train = math.floor(ratio * n + 0.5)
    if n_train in (0, n):
        raise DataError(f"ratio {ratio} leaves an empty partition for n={n}")
    perm = XorShift64Star(seed).permutation(n)
    return SplitIndices(tuple(sorted(perm[:n_train])), tuple(sorted(perm[n_train:])), seed, ratio)


def fit_ols(X, y) -> LstsqSolution:
    """Least squares via Householder QR with column pivoting.

    Columns whose pivot falls below ``max(n, p) * eps * |R[0, 0]|`` are
    treated as dependent and get a zero coefficient.
    """
    A = np.array(X, dtype=np.float64)
    b = np.array(y, dtype=np.float64)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DataError(f"shape mismatch: X {A.shape}, y {b.shape}")
    n, p = A.shape
    if n < p:
        raise NumericalError(f"underdetermined system ({n} rows < {p} columns)")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NumericalError("non-finite entries in least-squares input")

    perm = np.arange(p)
    diag = np.zeros(p)
    for k in range(p):
        norms = np.einsum("ij,ij->j", A[k:, k:], A[k:, k:])
        j = k + int(np.argmax(norms))
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
        x = A[k:, k]
        norm_x = math.sqrt(float(x @ x))
        if norm_x == 0.0:
            break
        alpha = -norm_x if x[0] >= 0 else norm_x
        v = x.copy()
        v[0] -= alpha
        vv = float(v @ v)
        A[k:, k:] -= np.outer(v, (2.0 / vv) * (v @ A[k:, k:]))
        b[k:] -= v * ((2.0 / vv) * float(v @ b[k:]))
        A[k + 1 :, k] = 0.0
        diag[k] = A[k, k]

    tol = max(n, p) * np.finfo(np.float64).eps * abs(diag[0]) if p else 0.0
    rank = int(np.count_nonzero(np.abs(diag) > tol)) if p else 0
    # pivoting sorts |R_kk| non-increasingly, so the first `rank` are the kept ones
    z = np.zeros(rank)
    for i in range(rank - 1, -1, -1):
        z[i] = (b[i] - A[i, i + 1 : rank] @ z[i + 1 :]) / A[i, i]
    coef = np.zeros(p)
    coef[perm[:rank]] = z
    warning = None
    if rank < p:
        dropped = sorted(int(c) for c in perm[rank:])
        warning = f"rank deficient design (rank {rank} < {p}); columns {dropped} set to 0"
    return LstsqSolution(coef, rank, tuple(int(c) for c in perm), warning)


def predict(coef, X) -> np.ndarray:
    coef = np.asarray(coef, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != coef.shape[0]:
        raise DataError(f"cannot apply {coef.shape[0]} coefficients to X of shape {X.shape}")
    return X @ coef


def r_squared(y, y_hat) -> float:
    """``1 - SS_res / SS_tot`` with the mean taken over the ``y`` being scored."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise DataError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if y.size < 2:
        raise NumericalError("R2 needs at least 2 observations")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise NumericalError("undefined R2 (zero total variance)")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / ss_tot


def normal_equation_residual(X, y, coef) -> float:
    """``||X^T (X b - y)||_inf / (1 + ||X^T y||_inf)``."""
    X = np.asarray(X)
    y = np.asarray(y)
    g = X.T @ (X @ coef - y)
    return float(np.max(np.abs(g), initial=0.0) / (1.0 + np.max(np.abs(X.T @ y), initial=0.0)))


def fit_month(m: MonthlyDataset, ratio: float = 0.8, seed: int = 42) -> FitResult:
    dm = build_design_matrix(m)
    split = train_test_split(len(m), ratio, mix_seed(seed, m.month))
    train, test = np.array(split.train), np.array(split.test)
    X_tr, y_tr = dm.X[train], dm.y[train]
    sol = fit_ols(X_tr, y_tr)
    y_te = dm.y[test]
    y_hat_te = predict(sol.coef, dm.X[test])
    resid_test = y_te - y_hat_te
    return FitResult(
        month=m.month,
        columns=dm.columns,
        coefficients=tuple(float(c) for c in sol.coef),
        r2_train=r_squared(y_tr, predict(sol.coef, X_tr)),
        r2_test=r_squared(y_te, y_hat_te),
        n_train=int(train.size),
        n_test=int(test.size),
        residual_mean=float(resid_test.mean()),
        residual_max_abs=float(np.max(np.abs(resid_test))),
        normal_residual=normal_equation_residual(X_tr, y_tr, sol.coef),
        rank=sol.rank,
        split=split,
        warning=sol.warning,
    )


def fit_monthly_models(
    datasets: list[MonthlyDataset], ratio: float = 0.8, seed: int = 42, workers: int = 1
) -> MonthlyFits:
    """Fit every month independently; months that cannot be fitted are skipped.

    Each month draws its split from ``mix_seed(seed, month)``, so results
    do not depend on which other months are present or on ``workers``.
    """

    def attempt(m: MonthlyDataset):
        if len(m) == 0:
            return m.month, None, "empty month"
        try:
            return m.month, fit_month(m, ratio, seed), None
        except (DataError, NumericalError) as exc:
            return m.month, None, str(exc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(attempt, datasets))
    else:
        outcomes = [attempt(m) for m in datasets]

    fits = MonthlyFits()
    for month, result, reason in sorted(outcomes, key=lambda o: o[0]):
        if result is None:
            fits.skipped[month] = reason
        else:
            fits.results.append(result)
    return fits
