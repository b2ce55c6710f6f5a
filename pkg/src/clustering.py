"""
Density-based clustering of embeddings and partition agreement.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.cluster import DBSCAN
from sklearn.metrics import adjusted_rand_score

from src.errors import ConfigError, DataError

NOISE = -1


@dataclass(frozen=True)
class DbscanConfig:
    eps: float = 0.15
    min_pts: int = 1

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError(f"DBSCAN eps must be positive, got {self.eps}")
        if int(self.min_pts) != self.min_pts or self.min_pts < 1:
            raise ConfigError(f"DBSCAN min_pts must be a positive integer, got {self.min_pts}")


@dataclass(frozen=True)
class ClusterAssignment:
    """One label per point; NOISE (-1) marks unclustered points."""
    labels: np.ndarray
    names: Optional[List[str]] = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise DataError("cluster labels must be a vector")
        object.__setattr__(self, "labels", labels.astype(np.int64))
        if self.names is not None and len(self.names) != labels.size:
            raise DataError(f"{len(self.names)} names for {labels.size} labels")

    def __len__(self):
        return int(self.labels.size)

    @property
    def n_clusters(self) -> int:
        return int(np.unique(self.labels[self.labels != NOISE]).size)

    @property
    def n_noise(self) -> int:
        return int(np.count_nonzero(self.labels == NOISE))

    def members(self, cluster: int) -> List[int]:
        return np.flatnonzero(self.labels == cluster).tolist()


def dbscan(points, cfg: DbscanConfig = None, names: Optional[List[str]] = None) -> ClusterAssignment:
    """
    Standard DBSCAN under the Euclidean metric.

    A point is core when its closed eps-ball holds at least min_pts points,
    itself included. Points are visited in ascending index order and cluster
    ids are handed out in order of discovery, so the same input always gives
    the same ids. With min_pts = 1 there is no noise.
    """
    cfg = cfg or DbscanConfig()
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[0] == 0:
        raise DataError(f"points must be a nonempty M x d matrix, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise DataError("points must be finite")

    # exact pairwise distances, so the closed-ball test is not subject to the
    # rounding of the dot-product expansion
    distances = squareform(pdist(points, metric="euclidean"))
    model = DBSCAN(eps=cfg.eps, min_samples=cfg.min_pts, metric="precomputed")
    return ClusterAssignment(model.fit_predict(distances), names=names)


def adjusted_rand_index(a: ClusterAssignment, b: ClusterAssignment) -> float:
    """Chance-corrected pair-counting agreement between two partitions."""
    labels_a = a.labels if isinstance(a, ClusterAssignment) else np.asarray(a)
    labels_b = b.labels if isinstance(b, ClusterAssignment) else np.asarray(b)
    if len(labels_a) != len(labels_b):
        raise DataError(f"length mismatch: {len(labels_a)} vs {len(labels_b)}")
    return float(adjusted_rand_score(labels_a, labels_b))
