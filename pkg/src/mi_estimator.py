"""
K-nearest neighbor mutual information estimator (Kraskov-Stogbauer-Grassberger,
first variant).

Neighborhoods use the Chebyshev (max-coordinate) metric. The joint distance
between two samples is the larger of the two marginal distances, so the
estimator works from the two marginal distance matrices and never builds the
concatenated sample space explicitly. The neighbor search is exhaustive: every
count equals the brute-force reference.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import digamma

from src.errors import ConfigError, DataError


@dataclass(frozen=True)
class MiConfig:
    """
    k: neighbor count (clamped to n - 1 per call)
    distance_floor: lower bound on the k-th neighbor distance, so duplicated
        samples never produce an empty neighborhood
    """
    k: int = 3
    distance_floor: float = 1e-12

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"MI neighbor count k must be a positive integer, got {self.k}")
        if not self.distance_floor > 0:
            raise ConfigError(f"distance_floor must be positive, got {self.distance_floor}")


def as_samples(matrix) -> np.ndarray:
    """Coerce to an n x p float matrix (a vector becomes one column)."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[1] < 1:
        raise DataError(f"samples must be an n x p matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DataError("samples must be finite")
    return m


def chebyshev_distances(samples: np.ndarray) -> np.ndarray:
    """n x n matrix of pairwise max-coordinate distances."""
    return cdist(samples, samples, metric="chebyshev")


def mi_from_distances(dist_x: np.ndarray, dist_y: np.ndarray, cfg: MiConfig) -> float:
    """
    KSG estimate from precomputed marginal distance matrices.

    psi(k) + psi(n) - <psi(n_x + 1) + psi(n_y + 1)>, where n_x and n_y count
    marginal neighbors strictly closer than the k-th joint neighbor. Both
    matrices include the zero self-distance, so the strict counts below
    already contain the "+ 1". The result is clamped at 0.
    """
    n = dist_x.shape[0]
    if dist_y.shape[0] != n:
        raise DataError(f"row-count mismatch: {n} vs {dist_y.shape[0]}")
    if n < 2:
        raise DataError(f"at least 2 samples are required, got {n}")
    k = min(cfg.k, n - 1)

    joint = np.maximum(dist_x, dist_y)
    # column k of each sorted row is the k-th neighbor (column 0 is self)
    eps = np.partition(joint, k, axis=1)[:, k]
    eps = np.maximum(eps, cfg.distance_floor)[:, None]

    count_x = np.count_nonzero(dist_x < eps, axis=1)
    count_y = np.count_nonzero(dist_y < eps, axis=1)

    estimate = digamma(k) + digamma(n) - np.mean(digamma(count_x) + digamma(count_y))
    return max(0.0, float(estimate))


def estimate_mi(x, y, cfg: MiConfig = None) -> float:
    """
    Mutual information in nats between the rows of x (n x p) and y (n x q).

    Symmetric in its arguments bit for bit and deterministic.
    """
    cfg = cfg or MiConfig()
    x = as_samples(x)
    y = as_samples(y)
    if x.shape[0] != y.shape[0]:
        raise DataError(f"row-count mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise DataError(f"at least 2 samples are required, got {x.shape[0]}")
    return mi_from_distances(chebyshev_distances(x), chebyshev_distances(y), cfg)
