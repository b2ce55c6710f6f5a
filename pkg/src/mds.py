"""
Classical (Torgerson) multidimensional scaling.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform

from src.errors import ConfigError, DataError, NumericalError
from src.transforms import DissimilarityMatrix
from src.utils import frame_to_csv_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Embedding:
    """
    coords: M x d, column c from the c-th largest eigenpair
    eigenvalues: all M eigenvalues of the double-centered matrix, descending
    dropped: 0-based columns whose eigenvalue was <= 0 (left as zeros)
    """
    names: List[str]
    coords: np.ndarray
    eigenvalues: np.ndarray
    dropped: List[int] = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    def distances(self) -> np.ndarray:
        return squareform(pdist(self.coords, metric="euclidean"))


def _as_dissimilarity(g: Union[DissimilarityMatrix, np.ndarray]) -> DissimilarityMatrix:
    if isinstance(g, DissimilarityMatrix):
        return g
    g = np.asarray(g, dtype=float)
    names = [f"s{i + 1}" for i in range(g.shape[0])] if g.ndim == 2 else []
    return DissimilarityMatrix(names, g)


def double_center(g: np.ndarray) -> np.ndarray:
    """B = -1/2 J (g o g) J with J = I - 11^T / M."""
    m = g.shape[0]
    j = np.eye(m) - np.ones((m, m)) / m
    b = -0.5 * j @ (g * g) @ j
    return (b + b.T) / 2


def classical_mds(g: Union[DissimilarityMatrix, np.ndarray], d: int = 2) -> Embedding:
    """
    Embed a dissimilarity matrix in d dimensions.

    Coordinates are v_i * sqrt(lambda_i) for the top-d eigenpairs. Eigenpairs
    with lambda <= 0 among the top d cannot be realized in Euclidean space:
    their column stays zero and a warning is logged. Each eigenvector's sign
    is fixed so its largest-magnitude component is positive.
    """
    g = _as_dissimilarity(g)
    m = g.size
    if int(d) != d or not 1 <= d <= m - 1:
        raise ConfigError(f"embedding dimension must lie in [1, {m - 1}], got {d}")
    d = int(d)

    b = double_center(g.values)
    try:
        evals, evecs = np.linalg.eigh(b)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigendecomposition failed: {e}") from e

    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]

    coords = np.zeros((m, d))
    dropped = []
    for c in range(d):
        v = evecs[:, c]
        pivot = int(np.argmax(np.abs(v)))
        if v[pivot] < 0:
            v = -v
        if evals[c] > 0:
            coords[:, c] = v * np.sqrt(evals[c])
        else:
            dropped.append(c)

    if dropped:
        logger.warning(
            f"MDS: {len(dropped)} of the top {d} eigenvalues are not positive "
            f"(dims {[c + 1 for c in dropped]}); those coordinates are zero"
        )
    return Embedding(names=g.names, coords=coords, eigenvalues=evals, dropped=dropped)


def stress(g: Union[DissimilarityMatrix, np.ndarray], e: Embedding) -> float:
    """Kruskal stress-1 of the embedding against g; 0 when g is all zeros."""
    g = _as_dissimilarity(g)
    if g.size != e.coords.shape[0]:
        raise DataError(f"size mismatch: {g.size} dissimilarities vs {e.coords.shape[0]} points")
    target = squareform(g.values, checks=False)
    fitted = pdist(e.coords, metric="euclidean")
    denominator = np.sum(target ** 2)
    if denominator == 0:
        return 0.0 if np.sum(fitted ** 2) == 0 else float("inf")
    return float(np.sqrt(np.sum((target - fitted) ** 2) / denominator))


# ===============================
# Embedding CSV
# ===============================

def embedding_to_csv_text(e: Embedding, clusters=None) -> str:
    """Header "name,dim1..dimd" plus a "cluster" column when labels are given."""
    frame = pd.DataFrame(e.coords, columns=[f"dim{c + 1}" for c in range(e.d)])
    frame.insert(0, "name", e.names)
    if clusters is not None:
        if len(clusters) != len(e.names):
            raise DataError(f"{len(clusters)} cluster labels for {len(e.names)} points")
        frame["cluster"] = clusters.labels
    return frame_to_csv_text(frame)


def load_embedding_csv(path: str):
    """Returns (Embedding, cluster labels or None); eigenvalues are not stored in the CSV."""
    try:
        frame = pd.read_csv(path, dtype={"name": str}, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as err:
        raise DataError(f"cannot read embedding {path}: {err}") from err
    dims = [c for c in frame.columns if c.startswith("dim")]
    if frame.columns[0] != "name" or not dims:
        raise DataError(f"{path}: expected header 'name,dim1,...'")
    coords = frame[dims].to_numpy(dtype=float)
    if not np.all(np.isfinite(coords)):
        raise DataError(f"{path}: non-finite coordinate")
    labels = frame["cluster"].to_numpy(dtype=np.int64) if "cluster" in frame.columns else None
    embedding = Embedding(names=frame["name"].tolist(), coords=coords, eigenvalues=np.array([]))
    return embedding, labels
