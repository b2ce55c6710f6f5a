"""
Utility helpers
Includes: atomic file output, digests, matrix CSV I/O, run manifest management
"""

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import DataError

# Matrices and embeddings are written at 17 significant digits so that they
# read back bit-identically.
FLOAT_FORMAT = "%.17g"


# ===============================
# 1. Atomic output
# ===============================

def atomic_write_text(path: str, text: str) -> str:
    """
    Write text to path via a temp file in the same directory plus rename.

    Readers never observe a partially written file, and a failure before the
    rename leaves any previous version untouched.
    """
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except OSError as e:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise DataError(f"cannot write {path}: {e}") from e
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def frame_to_csv_text(frame: pd.DataFrame, index: bool = False, index_label: Optional[str] = None) -> str:
    return frame.to_csv(
        None,
        index=index,
        index_label=index_label,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
    )


# ===============================
# 2. Digests
# ===============================

def file_digest(path: str) -> str:
    """SHA-256 of a file's bytes, hex encoded."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ===============================
# 3. Square matrix CSV I/O
# ===============================

def matrix_to_csv_text(names: List[str], values: np.ndarray) -> str:
    """
    Render a labelled square matrix.

    Header row and first column hold the series names; infinite entries
    (the similarity diagonal) are written as the literal token "inf".
    """
    frame = pd.DataFrame(np.asarray(values, dtype=float), index=list(names), columns=list(names))
    return frame_to_csv_text(frame, index=True, index_label="name")


def load_matrix_csv(path: str) -> Tuple[List[str], np.ndarray]:
    """Read a matrix written by matrix_to_csv_text. Returns (names, values)."""
    try:
        frame = pd.read_csv(path, index_col=0, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot read matrix {path}: {e}") from e

    row_names = [str(n) for n in frame.index]
    col_names = [str(n) for n in frame.columns]
    if row_names != col_names:
        raise DataError(f"matrix {path}: row names do not match column names")
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise DataError(f"matrix {path}: non-numeric entry ({e})") from e
    return col_names, values


# ===============================
# 4. Run manifest management
# ===============================

class ManifestManager:
    """Persists and reloads JSON run manifests."""

    def __init__(self, version: str):
        self.version = version

    def build(
        self,
        command: str,
        config: Dict,
        inputs: Dict[str, str],
        outputs: Dict[str, str],
        timings: Dict[str, float],
        warnings: List[str],
        extra: Optional[Dict] = None,
    ) -> Dict:
        """
        Assemble a manifest record.

        inputs/outputs map a logical role to a file path; both are recorded
        with their SHA-256 digests so a re-run can be verified.
        """
        manifest = {
            "tool": "amif-mds",
            "version": self.version,
            "command": command,
            "created": datetime.now(timezone.utc).isoformat(),
            "config": config,
            "inputs": {role: {"path": p, "sha256": file_digest(p)} for role, p in inputs.items()},
            "outputs": outputs,
            "timings_s": {stage: round(t, 6) for stage, t in timings.items()},
            "warnings": list(warnings),
        }
        if extra:
            manifest.update(extra)
        return manifest

    def save(self, manifest: Dict, path: str) -> str:
        text = json.dumps(manifest, ensure_ascii=False, indent=2, default=_json_default) + "\n"
        return atomic_write_text(path, text)

    @staticmethod
    def load(path: str) -> Dict:
        try:
            with open(path, "r", encoding="utf-8") as f:
                manifest = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise DataError(f"cannot read manifest {path}: {e}") from e
        if "command" not in manifest or "config" not in manifest:
            raise DataError(f"manifest {path} lacks command/config")
        return manifest


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
