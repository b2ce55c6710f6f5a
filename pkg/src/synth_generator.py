"""
Synthetic parent/child benchmark: independent AR(3) parents with a random
linear trend, each paired with its element-wise square.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.errors import ConfigError, DataError
from src.series_table import LabelVector, SeriesTable, standardize

logger = logging.getLogger(__name__)

AR_COEFF_BOUND = 0.5
# bounded retries for the (pathological) zero-variance family
MAX_ATTEMPTS = 16


@dataclass(frozen=True)
class SynthConfig:
    length: int = 2048
    n_parents: int = 8
    trend_scale: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 8:
            raise ConfigError(f"series length must be an integer >= 8, got {self.length}")
        if int(self.n_parents) != self.n_parents or self.n_parents < 1:
            raise ConfigError(f"number of parents must be a positive integer, got {self.n_parents}")
        if not self.trend_scale >= 0:
            raise ConfigError(f"trend scale must be nonnegative, got {self.trend_scale}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def family_rng(seed: int, family: int, attempt: int = 0) -> np.random.Generator:
    """
    PCG64 substream for one family.

    The family index (and retry attempt) is mixed into the seed through
    SeedSequence, so redrawing one family leaves every other one unchanged.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), family, attempt])))


def generate_family(rng: np.random.Generator, length: int, trend_scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    One trended AR(3) parent and its square.

    Draw order: a1, a2, a3, then the T innovations, then the slope.
    """
    a = rng.uniform(-AR_COEFF_BOUND, AR_COEFF_BOUND, size=3)
    noise = rng.standard_normal(length)
    beta = rng.uniform(-trend_scale, trend_scale) if trend_scale > 0 else 0.0

    x = noise.copy()
    t = np.arange(1, length + 1, dtype=float)
    # explosive draws overflow to inf; the caller rejects them
    with np.errstate(over="ignore", invalid="ignore"):
        for tau in range(3, length):
            x[tau] = a[0] * x[tau - 1] + a[1] * x[tau - 2] + a[2] * x[tau - 3] + noise[tau]
        x = x + beta * t
        return x, x * x


def generate(cfg: SynthConfig, normalize: bool = True) -> Tuple[SeriesTable, LabelVector, List[str]]:
    """
    Build the 2 * n_parents column table (x1, y1, x2, y2, ...) with labels
    (1, 1, 2, 2, ...).

    normalize=False skips the final standardization (test hook). Returns the
    table, the labels and a list of regeneration notes.
    """
    names, columns, labels, notes = [], [], [], []
    for p in range(cfg.n_parents):
        for attempt in range(MAX_ATTEMPTS):
            x, y = generate_family(family_rng(cfg.seed, p, attempt), cfg.length, cfg.trend_scale)
            with np.errstate(over="ignore", invalid="ignore"):
                sx, sy = x.std(), y.std()
            if np.isfinite(sx) and np.isfinite(sy) and sx > 0 and sy > 0:
                break
            note = f"family {p + 1}: degenerate (constant or overflowing) draw on attempt {attempt + 1}, regenerating"
            logger.warning(note)
            notes.append(note)
        else:
            raise DataError(f"family {p + 1}: no usable draw after {MAX_ATTEMPTS} attempts")

        names += [f"x{p + 1}", f"y{p + 1}"]
        columns += [x, y]
        labels += [p + 1, p + 1]

    table = SeriesTable(names=names, values=np.column_stack(columns))
    if normalize:
        table = standardize(table)
    return table, LabelVector(np.array(labels), names=names), notes
