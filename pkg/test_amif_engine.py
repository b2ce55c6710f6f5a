import numpy as np
import pytest

from src.amif_engine import (
    AmifConfig,
    AmifEngine,
    Normalization,
    SimilarityMatrix,
    aggregate,
    amif_score,
    freq_mi_matrix,
    refine,
    select_top_q,
    selection_count,
    similarity_matrix,
)
from src.errors import ConfigError, DataError
from src.mi_estimator import MiConfig, estimate_mi
from src.series_table import SeriesTable
from src.spectral import freq_samples, segment_and_fft
from src.synth_generator import SynthConfig, generate


def _table(m=4, length=256, seed=0):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((length, m))
    values[:, 1] = values[:, 0] ** 2
    return SeriesTable(names=[f"s{i}" for i in range(m)], values=values)


# ===============================
# Top-q selection
# ===============================

def test_walkthrough_top_ten_percent_keeps_eight_cells():
    m = np.arange(81, dtype=float).reshape(9, 9)
    rows, cols = select_top_q(m, 0.1)
    # the 8 largest cells are the last 8 of row 8
    assert rows == [8]
    assert cols == [1, 2, 3, 4, 5, 6, 7, 8]


def test_selection_count_has_a_minimum_of_one():
    m = np.zeros((4, 4))
    m[2, 3] = 1.0
    assert select_top_q(m, 0.01) == ([2], [3])


def test_ties_broken_in_row_major_order():
    m = np.ones((3, 3))
    # floor(0.34 * 9) = 3 cells: (0,0), (0,1), (0,2)
    assert select_top_q(m, 0.34) == ([0], [0, 1, 2])


def test_full_selection_uses_every_bin():
    rng = np.random.default_rng(0)
    rows, cols = select_top_q(rng.random((5, 5)), 1.0)
    assert rows == cols == [0, 1, 2, 3, 4]


def test_selection_count_uses_decimal_q():
    # q * n_f^2 in binary floating point lands just below these integers
    for q, n_f in [(0.47, 10), (0.57, 10), (0.59, 20), (0.83, 20), (0.94, 10)]:
        assert selection_count(q, n_f) == round(q * 100) * n_f * n_f // 100


def test_forty_seven_percent_of_ten_bins_keeps_forty_seven_cells():
    m = np.zeros((10, 10))
    # 46 largest cells fill rows 0-4 of columns 0-8 and cell (5, 0)
    cells = [(r, c) for r in range(5) for c in range(9)] + [(5, 0)]
    for rank, (r, c) in enumerate(cells):
        m[r, c] = 100.0 - rank
    # the 47th largest is the only selected cell in column 9
    m[0, 9] = 1.0

    rows, cols = select_top_q(m, 0.47)
    assert cols == list(range(10))
    assert rows == [0, 1, 2, 3, 4, 5]


@pytest.mark.parametrize("q", [0.0, -0.5, 1.5])
def test_invalid_q(q):
    with pytest.raises(ConfigError):
        select_top_q(np.ones((3, 3)), q)


# ===============================
# Aggregation
# ===============================

def test_walkthrough_aggregate_shapes():
    tensor = segment_and_fft(np.random.default_rng(1).standard_normal(36), 9)
    assert aggregate(tensor, [1, 4]).shape == (4, 4)
    assert aggregate(tensor, [0, 2, 5]).shape == (4, 6)


def test_aggregate_orders_bins_ascending():
    tensor = segment_and_fft(np.random.default_rng(2).standard_normal(36), 9)
    block = aggregate(tensor, [5, 2])
    np.testing.assert_array_equal(block[:, :2], freq_samples(tensor, 2))
    np.testing.assert_array_equal(block[:, 2:], freq_samples(tensor, 5))


def test_aggregate_empty_set_rejected():
    tensor = segment_and_fft(np.zeros(36), 9)
    with pytest.raises(DataError):
        aggregate(tensor, [])


# ===============================
# Frequency MI and pair score
# ===============================

def test_freq_mi_matrix_entries_match_estimator():
    rng = np.random.default_rng(3)
    a = segment_and_fft(rng.standard_normal(128), 8)
    b = segment_and_fft(rng.standard_normal(128), 8)
    m = freq_mi_matrix(a, b)

    assert m.shape == (8, 8)
    assert m[2, 5] == pytest.approx(estimate_mi(freq_samples(a, 2), freq_samples(b, 5)), abs=1e-12)
    assert np.all(m >= 0)


def test_freq_mi_matrix_shape_mismatch():
    a = segment_and_fft(np.zeros(64), 8)
    b = segment_and_fft(np.zeros(72), 8)
    with pytest.raises(DataError):
        freq_mi_matrix(a, b)


def test_score_pair_normalization():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(256)
    a = segment_and_fft(x, 8)
    b = segment_and_fft(x ** 2, 8)

    detail = AmifEngine(AmifConfig(n_f=8, q=0.5)).score_pair(a, b)
    mean_count = (len(detail["freqs_a"]) + len(detail["freqs_b"])) / 2
    assert detail["score"] == pytest.approx(detail["raw"] / mean_count)

    raw_cfg = AmifConfig(n_f=8, q=0.5, normalization=Normalization.NONE)
    assert amif_score(a, b, raw_cfg) == pytest.approx(detail["raw"])


def test_amif_config_validation():
    with pytest.raises(ConfigError):
        AmifConfig(n_f=1)
    with pytest.raises(ConfigError):
        AmifConfig(q=0.0)
    with pytest.raises(ConfigError):
        AmifConfig(normalization="median")
    assert AmifConfig(normalization="none").normalization is Normalization.NONE


# ===============================
# Similarity matrix
# ===============================

def test_similarity_matrix_structure():
    table = _table()
    s = similarity_matrix(table, AmifConfig(n_f=16, q=0.5, mi=MiConfig(k=3)))

    assert s.names == table.names
    assert np.all(np.isinf(np.diag(s.values)))
    off = s.off_diagonal()
    assert np.all(np.isfinite(off)) and np.all(off >= 0)
    np.testing.assert_array_equal(s.values, s.values.T)


def test_parent_child_pair_scores_highest():
    s = similarity_matrix(_table(length=2048), AmifConfig(n_f=16, q=0.5))
    values = np.array(s.values)
    np.fill_diagonal(values, -1.0)
    assert int(np.argmax(values[0])) == 1


def test_parallel_matches_sequential():
    table = _table(m=5)
    cfg = AmifConfig(n_f=16, q=0.5)
    sequential = AmifEngine(cfg, n_jobs=1).similarity_matrix(table)
    parallel = AmifEngine(cfg, n_jobs=2).similarity_matrix(table)
    np.testing.assert_array_equal(sequential.values, parallel.values)


def test_single_series_rejected():
    table = SeriesTable(names=["a"], values=np.random.default_rng(0).standard_normal((64, 1)))
    with pytest.raises(DataError):
        similarity_matrix(table, AmifConfig(n_f=8))


def test_series_too_short_for_n_f():
    table = _table(length=40)
    with pytest.raises(DataError):
        similarity_matrix(table, AmifConfig(n_f=32))


# ===============================
# Refinement
# ===============================

def test_refine_symmetrizes():
    values = np.array([[np.inf, 1.0, 2.0], [3.0, np.inf, 4.0], [0.0, 6.0, np.inf]])
    refined = refine(SimilarityMatrix(["a", "b", "c"], values))

    expected = np.array([[np.inf, 2.0, 1.0], [2.0, np.inf, 5.0], [1.0, 5.0, np.inf]])
    np.testing.assert_array_equal(refined.values, expected)


def test_refine_is_idempotent_on_symmetric_input():
    s = similarity_matrix(_table(), AmifConfig(n_f=16))
    np.testing.assert_array_equal(refine(s).values, s.values)


def test_refine_rejects_non_finite_off_diagonal():
    values = np.array([[np.inf, np.nan], [1.0, np.inf]])
    with pytest.raises(DataError):
        refine(SimilarityMatrix(["a", "b"], values))


# ===============================
# Dependence oracles
# ===============================

def test_independent_white_noise_frequency_mi_near_zero():
    rng = np.random.default_rng(11)
    # T = 4096 gives 256 segments per bin
    a = segment_and_fft(rng.standard_normal(4096), 16)
    b = segment_and_fft(rng.standard_normal(4096), 16)
    assert freq_mi_matrix(a, b).mean() < 0.1


def test_self_frequency_mi_dominates_its_row():
    a = segment_and_fft(np.random.default_rng(5).standard_normal(512), 8)
    m = freq_mi_matrix(a, a)
    for i in range(8):
        assert m[i, i] >= np.median(m[i])


def test_full_selection_scores_self_above_noise():
    cfg = AmifConfig(n_f=8, q=1.0)
    for seed in range(20):
        rng = np.random.default_rng(seed)
        a = segment_and_fft(rng.standard_normal(512), 8)
        noise = segment_and_fft(rng.standard_normal(512), 8)
        assert amif_score(a, a, cfg) > amif_score(a, noise, cfg)


@pytest.mark.slow
def test_partners_score_above_cross_family_median():
    separated = 0
    for seed in range(10):
        table, labels, _ = generate(SynthConfig(length=2048, n_parents=4, trend_scale=1e-3, seed=seed))
        s = similarity_matrix(table, AmifConfig(n_f=16, q=0.5), n_jobs=-1).values
        family = np.asarray(labels.labels)
        upper = np.triu(np.ones_like(s, dtype=bool), k=1)
        same = upper & (family[:, None] == family[None, :])
        cross = upper & (family[:, None] != family[None, :])
        if np.all(s[same] > np.median(s[cross])):
            separated += 1
    assert separated >= 8
