"""
Similarity -> dissimilarity conversion: normalization by the largest
off-diagonal score, then the membership or logarithmic transformation.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from src.amif_engine import SimilarityMatrix
from src.errors import ConfigError, DataError, NumericalError


class TransformKind(str, Enum):
    MEMBERSHIP = "membership"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class TransformConfig:
    kind: TransformKind = TransformKind.MEMBERSHIP
    epsilon: float = 1e-9

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", TransformKind(self.kind))
        except ValueError as e:
            raise ConfigError(f"unknown transform {self.kind!r}") from e
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric, nonnegative, finite, zero diagonal."""
    names: List[str]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DataError(f"dissimilarity matrix must be square, got shape {values.shape}")
        if values.shape[0] != len(self.names):
            raise DataError(f"{len(self.names)} names for a {values.shape[0]}x{values.shape[0]} matrix")
        if not np.all(np.isfinite(values)):
            raise DataError("dissimilarity entries must be finite")
        if np.any(values < 0):
            raise DataError("dissimilarity entries must be nonnegative")
        if np.any(np.diag(values) != 0):
            raise DataError("dissimilarity diagonal must be zero")
        if not np.array_equal(values, values.T):
            raise DataError("dissimilarity matrix must be symmetric")
        object.__setattr__(self, "names", list(self.names))
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def normalize_similarity(s: SimilarityMatrix) -> SimilarityMatrix:
    """
    Divide every finite entry by the largest finite off-diagonal score.

    The infinite diagonal is left as is.
    """
    values = s.values
    off = s.off_diagonal()
    finite_off = off[np.isfinite(off)]
    if finite_off.size == 0 or finite_off.max() <= 0:
        raise NumericalError("cannot normalize: every off-diagonal similarity is zero")
    peak = finite_off.max()
    normalized = np.where(np.isfinite(values), values / peak, values)
    return SimilarityMatrix(s.names, normalized)


def _off_diagonal_view(s_norm: SimilarityMatrix) -> np.ndarray:
    values = np.array(s_norm.values, dtype=float)
    off = ~np.eye(values.shape[0], dtype=bool)
    if np.any(values[off] < 0) or np.any(values[off] > 1):
        raise DataError("normalized similarities must lie in [0, 1] off the diagonal")
    return values


def membership(s_norm: SimilarityMatrix) -> DissimilarityMatrix:
    """g = 1 - s off the diagonal."""
    values = _off_diagonal_view(s_norm)
    g = 1.0 - values
    np.fill_diagonal(g, 0.0)
    return DissimilarityMatrix(s_norm.names, g)


def logarithmic(s_norm: SimilarityMatrix, epsilon: float = 1e-9) -> DissimilarityMatrix:
    """g = max(0, -ln(s + epsilon)) off the diagonal; may exceed 1."""
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    values = _off_diagonal_view(s_norm)
    np.fill_diagonal(values, 1.0)
    g = np.maximum(0.0, -np.log(values + epsilon))
    np.fill_diagonal(g, 0.0)
    return DissimilarityMatrix(s_norm.names, g)


def to_dissimilarity(s: SimilarityMatrix, cfg: TransformConfig = None) -> DissimilarityMatrix:
    cfg = cfg or TransformConfig()
    s_norm = normalize_similarity(s)
    if cfg.kind is TransformKind.MEMBERSHIP:
        return membership(s_norm)
    return logarithmic(s_norm, cfg.epsilon)
