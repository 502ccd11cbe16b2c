"""Statistical primitives shared by the analysis pipelines.

Everything here is deliberately hand-rolled: the analyses downstream need
bit-reproducible, dependency-free correlation and calibration numbers, and
the test suite pins them against hand-computed values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class PairedSeries:
    """Two equal-length series of finite reals."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise InputError("paired series must be 1-D and equal length")
        if len(x) < 2:
            raise InputError("paired series needs at least 2 points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InputError("paired series contains non-finite values")


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=np.float64) + self.intercept


def pearson(series: PairedSeries) -> float:
    """Sample Pearson correlation; raises on zero variance."""
    x, y = series.x, series.y
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = dx @ dx
    syy = dy @ dy
    if sxx == 0.0 or syy == 0.0:
        raise InputError("undefined correlation: a series has zero variance")
    r = (dx @ dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def rank_average(values) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean of their rank block."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(series: PairedSeries) -> float:
    """Pearson correlation of average ranks."""
    return pearson(PairedSeries(rank_average(series.x), rank_average(series.y)))


def linear_fit(series: PairedSeries) -> LinearFit:
    """Ordinary least squares y = slope*x + intercept."""
    x, y = series.x, series.y
    dx = x - x.mean()
    sxx = dx @ dx
    if sxx == 0.0:
        raise InputError("linear fit undefined: x has zero variance")
    slope = (dx @ (y - y.mean())) / sxx
    intercept = y.mean() - slope * x.mean()
    resid = y - (slope * x + intercept)
    syy = (y - y.mean()) @ (y - y.mean())
    r2 = 1.0 if syy == 0.0 else 1.0 - (resid @ resid) / syy
    return LinearFit(float(slope), float(intercept), float(min(1.0, max(0.0, r2))))


def quartile_split(values, keys) -> list[np.ndarray]:
    """Sort by key ascending and cut into 4 contiguous index groups.

    Group sizes differ by at most one; when n is not divisible by 4 the
    earlier groups take the extra elements. The last group holds the
    largest keys. Ties keep input order (stable sort). Returns index
    arrays into the original sequences.
    """
    v = np.asarray(values, dtype=np.float64)
    k = np.asarray(keys, dtype=np.float64)
    if len(v) != len(k):
        raise InputError("values and keys must have equal length")
    n = len(k)
    if n < 4:
        raise InputError("need at least 4 elements to form quartiles")
    order = np.argsort(k, kind="stable")
    base, extra = divmod(n, 4)
    sizes = [base + (1 if i < extra else 0) for i in range(4)]
    groups = []
    start = 0
    for s in sizes:
        groups.append(order[start : start + s])
        start += s
    return groups


def log_bin(values, edges) -> np.ndarray:
    """Bin index per value for half-open bins [e_i, e_{i+1}).

    Values at or above the last edge land in the final bin; positive
    values below the first edge clamp to bin 0. Nonpositive values are
    rejected.
    """
    v = np.asarray(values, dtype=np.float64)
    e = np.asarray(edges, dtype=np.float64)
    if len(e) < 1 or np.any(np.diff(e) <= 0):
        raise InputError("edges must be strictly ascending and nonempty")
    if np.any(v <= 0):
        bad = v[v <= 0][0]
        raise InputError(f"log_bin requires positive values, got {bad}")
    idx = np.searchsorted(e, v, side="right") - 1
    return np.clip(idx, 0, len(e) - 1)
