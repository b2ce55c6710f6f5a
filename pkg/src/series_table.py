"""
Series table data model
Includes: SeriesTable / LabelVector types, CSV ingestion with incomplete-column
exclusion, per-column standardization
"""

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.errors import DataError
from src.utils import atomic_write_text, frame_to_csv_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesTable:
    """
    Named, equal-length real-valued columns.

    values is T x M (time along rows, one column per series). sample_interval
    is informational metadata in seconds and never enters a computation.
    excluded records columns dropped at load time, name -> reason.
    """
    names: List[str]
    values: np.ndarray
    sample_interval: Optional[float] = None
    excluded: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError(f"series values must be a T x M matrix, got shape {values.shape}")
        if values.shape[1] != len(self.names):
            raise DataError(f"{len(self.names)} names for {values.shape[1]} columns")
        if values.shape[0] == 0 or values.shape[1] == 0:
            raise DataError("series table is empty")
        if any(not isinstance(n, str) or not n for n in self.names):
            raise DataError("series names must be nonempty strings")
        if len(set(self.names)) != len(self.names):
            raise DataError("series names must be unique")
        if not np.all(np.isfinite(values)):
            raise DataError("series values must be finite")
        object.__setattr__(self, "names", list(self.names))
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=self.names)


@dataclass(frozen=True)
class LabelVector:
    """Ground-truth integer label per series, in table column order."""
    labels: np.ndarray
    names: Optional[List[str]] = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise DataError("labels must be a vector")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise DataError("labels must be integers")
        object.__setattr__(self, "labels", labels.astype(np.int64))
        if self.names is not None and len(self.names) != labels.size:
            raise DataError(f"{len(self.names)} names for {labels.size} labels")

    def __len__(self):
        return int(self.labels.size)

    def check_against(self, table: SeriesTable):
        if len(self) != table.n_series:
            raise DataError(f"{len(self)} labels for {table.n_series} series")
        if self.names is not None and list(self.names) != table.names:
            raise DataError("label names do not match the table columns")


# ===============================
# 1. CSV ingestion
# ===============================

def load_csv(path: str, drop_incomplete: bool = True, sample_interval: Optional[float] = None) -> SeriesTable:
    """
    Load a header + numeric-body CSV into a SeriesTable.

    Columns holding an empty or non-numeric cell are dropped when
    drop_incomplete is set (each reported as "excluded: <name>: <reason>"),
    otherwise the first such cell is an error. Surviving columns keep their
    file order.
    """
    if not os.path.isfile(path):
        raise DataError(f"cannot read {path}: file not found")

    # Reading everything as text keeps empty cells ("") apart from fields
    # missing at the end of a short row (NaN).
    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path}: file is empty") from e
    except pd.errors.ParserError as e:
        raise DataError(f"{path}: ragged rows ({e})") from e
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e

    names = [str(h).strip() for h in raw.iloc[0]]
    if any(not n for n in names):
        raise DataError(f"{path}: header contains an empty column name")
    if len(set(names)) != len(names):
        raise DataError(f"{path}: duplicate column names in header")

    body = raw.iloc[1:].reset_index(drop=True)
    if len(body) == 0:
        raise DataError(f"{path}: zero rows")

    short_rows = body.isna().any(axis=1)
    if short_rows.any():
        row = int(np.flatnonzero(short_rows.to_numpy())[0]) + 2
        raise DataError(f"{path}: ragged rows (line {row} has fewer than {len(names)} fields)")

    kept_names, kept_columns, excluded = [], [], {}
    for position, name in enumerate(names):
        cells = body.iloc[:, position].str.strip()
        numeric = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(numeric)
        if bad.any():
            reason = "missing value" if (cells == "").any() else "non-numeric value"
            if not drop_incomplete:
                row = int(np.flatnonzero(bad)[0]) + 2
                raise DataError(f"{path}: column {name!r} has a {reason} at line {row}")
            excluded[name] = reason
            logger.warning(f"excluded: {name}: {reason}")
            continue
        kept_names.append(name)
        kept_columns.append(np.array([float(c) for c in cells], dtype=float))

    if len(kept_names) < 2:
        raise DataError(f"{path}: fewer than 2 usable columns ({len(kept_names)} left)")

    return SeriesTable(
        names=kept_names,
        values=np.column_stack(kept_columns),
        sample_interval=sample_interval,
        excluded=excluded,
    )


def table_to_csv_text(table: SeriesTable) -> str:
    return frame_to_csv_text(table.to_frame())


def save_csv(table: SeriesTable, path: str) -> str:
    return atomic_write_text(path, table_to_csv_text(table))


def labels_to_csv_text(names: List[str], labels: LabelVector) -> str:
    frame = pd.DataFrame({"name": list(names), "label": labels.labels})
    return frame_to_csv_text(frame)


def load_labels_csv(path: str) -> LabelVector:
    """Read a "name,label" CSV."""
    try:
        frame = pd.read_csv(path, dtype={"name": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot read labels {path}: {e}") from e
    if list(frame.columns[:2]) != ["name", "label"]:
        raise DataError(f"{path}: expected header 'name,label'")
    if frame["label"].isna().any():
        raise DataError(f"{path}: missing label")
    return LabelVector(labels=frame["label"].to_numpy(), names=frame["name"].tolist())


# ===============================
# 2. Standardization
# ===============================

def standardize(table: SeriesTable) -> SeriesTable:
    """
    Scale every column to mean 0 and population variance 1.

    A constant column cannot be scaled and raises a DataError naming it.
    """
    values = table.values
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=0)
    for name, s in zip(table.names, std):
        if s == 0.0 or not np.isfinite(s):
            raise DataError(f"column {name!r} has zero variance")
    return replace(table, values=(values - mean) / std)
