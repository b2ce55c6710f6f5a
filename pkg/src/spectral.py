"""
Segmented spectra: split a series into non-overlapping n_f-point segments and
take the FFT of each one.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import fft

from src.errors import DataError


@dataclass(frozen=True)
class SpectralTensor:
    """coeffs[s, k] is bin k of segment s (unnormalized DFT)."""
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 2 or coeffs.shape[0] < 1 or coeffs.shape[1] < 1:
            raise DataError(f"spectral coefficients must be a nonempty matrix, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise DataError("spectral coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n_seg(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_f(self) -> int:
        return self.coeffs.shape[1]


def segment_and_fft(series: Sequence[float], n_f: int) -> SpectralTensor:
    """
    Rectangular, non-overlapping segmentation followed by an n_f-point FFT.

    floor(T / n_f) segments are used; the trailing remainder is discarded.
    At least two segments are required so MI across segments is defined.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DataError("series must be one-dimensional")
    if int(n_f) != n_f or n_f < 1:
        raise DataError(f"n_f must be a positive integer, got {n_f}")
    n_f = int(n_f)
    if x.size < 2 * n_f:
        raise DataError(f"series of length {x.size} is shorter than 2 * n_f = {2 * n_f}")

    n_seg = x.size // n_f
    segments = x[: n_seg * n_f].reshape(n_seg, n_f)
    return SpectralTensor(fft.fft(segments, axis=1))


def freq_samples(tensor: SpectralTensor, k: int) -> np.ndarray:
    """n_seg x 2 samples of bin k: column 0 real parts, column 1 imaginary parts."""
    if int(k) != k or not 0 <= k < tensor.n_f:
        raise DataError(f"bin index {k} out of range [0, {tensor.n_f})")
    column = tensor.coeffs[:, int(k)]
    return np.column_stack([column.real, column.imag])
