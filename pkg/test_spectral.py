import numpy as np
import pytest

from src.errors import DataError
from src.spectral import SpectralTensor, freq_samples, segment_and_fft


def test_walkthrough_segment_count():
    x = np.arange(36, dtype=float)
    tensor = segment_and_fft(x, 9)
    assert tensor.n_seg == 4
    assert tensor.n_f == 9


def test_segments_match_numpy_fft():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(100)
    tensor = segment_and_fft(x, 16)

    # trailing 4 samples are discarded
    expected = np.fft.fft(x[:96].reshape(6, 16), axis=1)
    np.testing.assert_allclose(tensor.coeffs, expected, atol=1e-12)


def test_series_shorter_than_two_segments_rejected():
    with pytest.raises(DataError):
        segment_and_fft(np.zeros(31), 16)


def test_exactly_two_segments_accepted():
    assert segment_and_fft(np.zeros(32), 16).n_seg == 2


def test_freq_samples_real_and_imaginary_columns():
    rng = np.random.default_rng(1)
    tensor = segment_and_fft(rng.standard_normal(64), 8)
    samples = freq_samples(tensor, 3)

    assert samples.shape == (8, 2)
    np.testing.assert_array_equal(samples[:, 0], tensor.coeffs[:, 3].real)
    np.testing.assert_array_equal(samples[:, 1], tensor.coeffs[:, 3].imag)


def test_dc_bin_has_zero_imaginary_part():
    rng = np.random.default_rng(2)
    samples = freq_samples(segment_and_fft(rng.standard_normal(64), 8), 0)
    np.testing.assert_allclose(samples[:, 1], 0.0, atol=1e-12)


@pytest.mark.parametrize("k", [-1, 8])
def test_freq_samples_out_of_range(k):
    tensor = segment_and_fft(np.arange(16, dtype=float), 8)
    with pytest.raises(DataError):
        freq_samples(tensor, k)


def test_tensor_rejects_non_finite():
    with pytest.raises(DataError):
        SpectralTensor(np.array([[1.0, np.inf]]))


def test_constant_series_is_dc_only():
    tensor = segment_and_fft(np.full(48, 2.5), 16)
    expected = np.zeros((3, 16), dtype=complex)
    expected[:, 0] = 2.5 * 16
    np.testing.assert_allclose(tensor.coeffs, expected, atol=1e-12)


def test_cosine_energy_in_bins_two_and_fourteen():
    t = np.arange(32)
    tensor = segment_and_fft(np.cos(2 * np.pi * 2 * t / 16), 16)
    magnitude = np.abs(tensor.coeffs)

    np.testing.assert_allclose(magnitude[:, [2, 14]], 8.0, atol=1e-9)
    others = np.delete(magnitude, [2, 14], axis=1)
    np.testing.assert_allclose(others, 0.0, atol=1e-9)


def test_parseval_per_segment():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(16 * 12)
    tensor = segment_and_fft(x, 16)

    energy = np.sum(np.abs(tensor.coeffs) ** 2, axis=1)
    expected = 16 * np.sum(x.reshape(12, 16) ** 2, axis=1)
    np.testing.assert_allclose(energy, expected, rtol=1e-6)


def test_real_input_bins_are_conjugate_pairs():
    rng = np.random.default_rng(4)
    coeffs = segment_and_fft(rng.standard_normal(160), 16).coeffs
    for k in range(1, 16):
        np.testing.assert_allclose(coeffs[:, k], np.conj(coeffs[:, 16 - k]), atol=1e-12)
