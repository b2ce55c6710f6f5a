"""
Linear comparison metrics: maximum absolute cross-correlation (MACC), absolute
correlation coefficient (MACCoeff) and Euclidean distance.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import signal
from scipy.spatial.distance import pdist, squareform

from src.amif_engine import INFINITY, SimilarityMatrix
from src.errors import ConfigError, DataError
from src.series_table import SeriesTable
from src.transforms import DissimilarityMatrix


class BaselineMetric(str, Enum):
    MACC = "macc"
    MACCOEFF = "maccoeff"


def default_max_lag(length: int) -> int:
    return min(length - 1, length // 4)


def _centered(x, y) -> Tuple[np.ndarray, np.ndarray, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DataError("series must be one-dimensional")
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} vs {y.size}")
    sx = x.std()
    sy = y.std()
    if sx == 0 or sy == 0:
        raise DataError("zero-variance input")
    xc = x - x.mean()
    yc = y - y.mean()
    return xc, yc, x.size * sx * sy


def macc_with_lag(x, y, max_lag: Optional[int] = None) -> Tuple[float, int]:
    """
    Peak |r(l)| over l in [-max_lag, max_lag] and the lag where it occurs.

    r(l) = (1/T) sum_t x~_t y~_{t+l} / (sigma_x sigma_y), with products that
    fall outside the series counted as zero. A positive lag means y trails x.
    The earliest lag wins a tie.
    """
    xc, yc, scale = _centered(x, y)
    length = xc.size
    max_lag = default_max_lag(length) if max_lag is None else int(max_lag)
    if not 0 <= max_lag < length:
        raise ConfigError(f"max_lag must lie in [0, {length - 1}], got {max_lag}")

    # correlate(yc, xc)[lag] = sum_t yc[t + lag] * xc[t]
    full = signal.correlate(yc, xc, mode="full", method="direct")
    lags = signal.correlation_lags(length, length, mode="full")
    window = np.abs(lags) <= max_lag
    r = np.abs(full[window]) / scale
    best = int(np.argmax(r))
    return float(min(1.0, r[best])), int(lags[window][best])


def macc(x, y, max_lag: Optional[int] = None) -> float:
    return macc_with_lag(x, y, max_lag)[0]


def maccoeff(x, y) -> float:
    """|Pearson correlation| at lag 0."""
    xc, yc, scale = _centered(x, y)
    return float(min(1.0, abs(np.dot(xc, yc)) / scale))


def baseline_similarity_matrix(
    table: SeriesTable, metric: BaselineMetric = BaselineMetric.MACC, max_lag: Optional[int] = None
) -> SimilarityMatrix:
    """Pairwise MACC or MACCoeff, each unordered pair once; diagonal = INFINITY."""
    try:
        metric = BaselineMetric(metric)
    except ValueError as e:
        raise ConfigError(f"unknown baseline metric {metric!r}") from e
    if table.n_series < 2:
        raise DataError(f"pairwise analysis needs at least 2 series, got {table.n_series}")

    m = table.n_series
    values = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            x, y = table.values[:, i], table.values[:, j]
            s = macc(x, y, max_lag) if metric is BaselineMetric.MACC else maccoeff(x, y)
            values[i, j] = s
            values[j, i] = s
    np.fill_diagonal(values, INFINITY)
    return SimilarityMatrix(table.names, values)


def euclidean_dissim(table: SeriesTable) -> DissimilarityMatrix:
    """L2 norm of every column difference; zero diagonal."""
    return DissimilarityMatrix(table.names, squareform(pdist(table.values.T, metric="euclidean")))
