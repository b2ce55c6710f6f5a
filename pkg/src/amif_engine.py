"""
Aggregate mutual information in frequency (AMIF)

Pairwise pipeline for two series:
    segment + FFT -> n_f x n_f frequency-MI matrix -> top-q cells
    -> aggregate the selected bins of each series -> one MI estimate
    -> normalize by the mean selected-bin count
System-wide: every unordered pair once, mirrored, diagonal = +inf.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.errors import ConfigError, DataError
from src.mi_estimator import MiConfig, as_samples, chebyshev_distances, mi_from_distances
from src.series_table import SeriesTable
from src.spectral import SpectralTensor, freq_samples, segment_and_fft

# Diagonal marker: MI of a continuous variable with itself is unbounded.
INFINITY = float("inf")


class Normalization(str, Enum):
    MEAN_FREQUENCY_COUNT = "mean-frequency-count"
    NONE = "none"


@dataclass(frozen=True)
class AmifConfig:
    n_f: int = 16
    q: float = 0.5
    mi: MiConfig = field(default_factory=MiConfig)
    normalization: Normalization = Normalization.MEAN_FREQUENCY_COUNT

    def __post_init__(self):
        if int(self.n_f) != self.n_f or self.n_f < 2:
            raise ConfigError(f"n_f must be an integer >= 2, got {self.n_f}")
        if not 0 < self.q <= 1:
            raise ConfigError(f"q must lie in (0, 1], got {self.q}")
        try:
            object.__setattr__(self, "normalization", Normalization(self.normalization))
        except ValueError as e:
            raise ConfigError(f"unknown normalization {self.normalization!r}") from e


@dataclass(frozen=True)
class SimilarityMatrix:
    """M x M scores; off-diagonal >= 0, diagonal is the INFINITY sentinel."""
    names: List[str]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataError(f"similarity matrix must be square, got shape {values.shape}")
        if values.shape[0] != len(self.names):
            raise DataError(f"{len(self.names)} names for a {values.shape[0]}x{values.shape[0]} matrix")
        object.__setattr__(self, "names", list(self.names))
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        return self.values[~np.eye(self.size, dtype=bool)]


# ===============================
# 1. Frequency-pair MI matrix
# ===============================

def _bin_distances(tensor: SpectralTensor) -> np.ndarray:
    """n_f x n_seg x n_seg Chebyshev distances of every bin's samples."""
    return np.stack([chebyshev_distances(freq_samples(tensor, k)) for k in range(tensor.n_f)])


def _check_compatible(a: SpectralTensor, b: SpectralTensor):
    if a.n_seg != b.n_seg or a.n_f != b.n_f:
        raise DataError(
            f"spectral shape mismatch: {a.n_seg}x{a.n_f} vs {b.n_seg}x{b.n_f}"
        )


def _freq_mi_from_distances(dist_a: np.ndarray, dist_b: np.ndarray, mi: MiConfig) -> np.ndarray:
    n_f = dist_a.shape[0]
    m = np.empty((n_f, n_f))
    for i in range(n_f):
        for j in range(n_f):
            m[i, j] = mi_from_distances(dist_a[i], dist_b[j], mi)
    return m


def freq_mi_matrix(a: SpectralTensor, b: SpectralTensor, mi: MiConfig = None) -> np.ndarray:
    """Entry (i, j) = MI between bin i of a and bin j of b (n_f^2 estimates)."""
    _check_compatible(a, b)
    return _freq_mi_from_distances(_bin_distances(a), _bin_distances(b), mi or MiConfig())


# ===============================
# 2. Top-q selection and aggregation
# ===============================

def selection_count(q: float, n_f: int) -> int:
    """max(1, floor(q * n_f^2)) with q taken at its decimal value (0.47 * 100 is 47, not 46)."""
    return max(1, math.floor(Fraction(repr(float(q))) * n_f * n_f))


def select_top_q(m: np.ndarray, q: float) -> Tuple[List[int], List[int]]:
    """
    Keep the max(1, floor(q * n_f^2)) largest cells.

    Ties are broken by ascending (row, col), so the selection is a pure
    function of the matrix. Returns the sorted distinct rows (bins of the
    first series) and columns (bins of the second series).
    """
    if not 0 < q <= 1:
        raise ConfigError(f"q must lie in (0, 1], got {q}")
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DataError(f"frequency MI matrix must be square, got shape {m.shape}")
    n_f = m.shape[0]
    count = selection_count(q, n_f)

    # stable sort on -value keeps row-major (row, col) order among ties
    order = np.argsort(-m.ravel(), kind="stable")[:count]
    rows, cols = np.divmod(order, n_f)
    return np.unique(rows).tolist(), np.unique(cols).tolist()


def aggregate(t: SpectralTensor, freqs: Sequence[int]) -> np.ndarray:
    """Concatenate freq_samples over the bins in ascending order: n_seg x 2|freqs|."""
    freqs = sorted(set(int(k) for k in freqs))
    if not freqs:
        raise DataError("cannot aggregate an empty frequency set")
    return np.hstack([freq_samples(t, k) for k in freqs])


# ===============================
# 3. AMIF engine
# ===============================

class AmifEngine:
    """
    Computes AMIF scores between series and the system-wide similarity matrix.

    n_jobs > 1 (or -1 for all cores) evaluates pairs in parallel with joblib;
    results are assembled in (i < j) pair order, so the matrix is identical
    to the sequential one.
    """

    def __init__(self, config: AmifConfig = None, n_jobs: int = 1):
        self.config = config or AmifConfig()
        self.n_jobs = n_jobs

    def score_pair(self, a: SpectralTensor, b: SpectralTensor) -> Dict:
        """
        Full detail for one pair.

        Returns:
            {
                "score": normalized AMIF,
                "raw": MI between the two aggregates,
                "freqs_a": selected bins of a,
                "freqs_b": selected bins of b,
                "freq_mi": n_f x n_f frequency MI matrix
            }
        """
        _check_compatible(a, b)
        return _score_from_distances(a, b, _bin_distances(a), _bin_distances(b), self.config)

    def similarity_matrix(self, table: SeriesTable) -> SimilarityMatrix:
        if table.n_series < 2:
            raise DataError(f"pairwise analysis needs at least 2 series, got {table.n_series}")
        cfg = self.config
        tensors = [segment_and_fft(table.values[:, c], cfg.n_f) for c in range(table.n_series)]
        distances = [_bin_distances(t) for t in tensors]

        pairs = [(i, j) for i in range(table.n_series) for j in range(i + 1, table.n_series)]
        if self.n_jobs == 1:
            scores = [
                _score_from_distances(tensors[i], tensors[j], distances[i], distances[j], cfg)["score"]
                for i, j in pairs
            ]
        else:
            scores = Parallel(n_jobs=self.n_jobs)(
                delayed(_pair_score)(tensors[i], tensors[j], distances[i], distances[j], cfg)
                for i, j in pairs
            )

        values = np.zeros((table.n_series, table.n_series))
        for (i, j), s in zip(pairs, scores):
            values[i, j] = s
            values[j, i] = s
        np.fill_diagonal(values, INFINITY)
        return SimilarityMatrix(table.names, values)


def _score_from_distances(a, b, dist_a, dist_b, cfg: AmifConfig) -> Dict:
    freq_mi = _freq_mi_from_distances(dist_a, dist_b, cfg.mi)
    freqs_a, freqs_b = select_top_q(freq_mi, cfg.q)
    agg_a = as_samples(aggregate(a, freqs_a))
    agg_b = as_samples(aggregate(b, freqs_b))
    raw = mi_from_distances(chebyshev_distances(agg_a), chebyshev_distances(agg_b), cfg.mi)
    if cfg.normalization is Normalization.MEAN_FREQUENCY_COUNT:
        score = raw / ((len(freqs_a) + len(freqs_b)) / 2)
    else:
        score = raw
    return {"score": score, "raw": raw, "freqs_a": freqs_a, "freqs_b": freqs_b, "freq_mi": freq_mi}


def _pair_score(a, b, dist_a, dist_b, cfg) -> float:
    return _score_from_distances(a, b, dist_a, dist_b, cfg)["score"]


def amif_score(a: SpectralTensor, b: SpectralTensor, cfg: AmifConfig = None) -> float:
    return AmifEngine(cfg).score_pair(a, b)["score"]


def similarity_matrix(table: SeriesTable, cfg: AmifConfig = None, n_jobs: int = 1) -> SimilarityMatrix:
    return AmifEngine(cfg, n_jobs=n_jobs).similarity_matrix(table)


# ===============================
# 4. Refinement
# ===============================

def refine(s: SimilarityMatrix) -> SimilarityMatrix:
    """Average with the transpose off the diagonal; diagonal = INFINITY."""
    values = np.asarray(s.values, dtype=float)
    off = ~np.eye(values.shape[0], dtype=bool)
    if not np.all(np.isfinite(values[off])):
        raise DataError("similarity matrix has non-finite off-diagonal entries")
    refined = (values + values.T) / 2
    np.fill_diagonal(refined, INFINITY)
    return SimilarityMatrix(s.names, refined)
