import numpy as np
import pytest

from src.amif_engine import SimilarityMatrix
from src.analysis_engine import ClusterAnalyzer, nearest_neighbors, partner_recovery_rate, select_core_series
from src.clustering import ClusterAssignment
from src.errors import DataError
from src.series_table import LabelVector
from src.transforms import DissimilarityMatrix

NAMES = ["x1", "y1", "x2", "y2"]
INF = np.inf


def _dissim():
    values = np.array([
        [0.0, 0.1, 0.9, 0.8],
        [0.1, 0.0, 0.7, 0.9],
        [0.9, 0.7, 0.0, 0.2],
        [0.8, 0.9, 0.2, 0.0],
    ])
    return DissimilarityMatrix(NAMES, values)


def _similarity():
    values = np.array([
        [INF, 5.0, 1.0, 2.0],
        [5.0, INF, 3.0, 1.0],
        [1.0, 3.0, INF, 4.0],
        [2.0, 1.0, 4.0, INF],
    ])
    return SimilarityMatrix(NAMES, values)


def test_nearest_neighbors():
    np.testing.assert_array_equal(nearest_neighbors(_dissim()), [1, 0, 3, 2])


def test_nearest_neighbor_ties_take_lowest_index():
    g = DissimilarityMatrix(["a", "b", "c"], np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 2.0], [1.0, 2.0, 0.0]]))
    assert nearest_neighbors(g)[0] == 1


def test_partner_recovery_rate():
    assert partner_recovery_rate(_dissim(), LabelVector(np.array([1, 1, 2, 2]))) == 1.0
    assert partner_recovery_rate(_dissim(), np.array([1, 2, 1, 2])) == 0.0


def test_partner_recovery_length_mismatch():
    with pytest.raises(DataError):
        partner_recovery_rate(_dissim(), np.array([1, 1, 2]))


def test_core_series_has_largest_within_cluster_similarity():
    assignment = ClusterAssignment(np.array([0, 0, 0, 1]))
    core = select_core_series(_similarity(), assignment)
    # within cluster 0: x1 = 6, y1 = 8, x2 = 4
    assert core == {0: "y1", 1: "y2"}


def test_core_series_skips_noise():
    assignment = ClusterAssignment(np.array([0, 0, -1, -1]))
    assert select_core_series(_similarity(), assignment) == {0: "x1"}


def test_analyze_summary():
    assignment = ClusterAssignment(np.array([0, 0, 1, 2]))
    truth = LabelVector(np.array([1, 1, 2, 2]))
    summary = ClusterAnalyzer().analyze(NAMES, assignment, _similarity(), _dissim(), truth)

    assert summary["n_clusters"] == 3
    assert summary["clusters"] == {0: ["x1", "y1"], 1: ["x2"], 2: ["y2"]}
    assert summary["singletons"] == ["x2", "y2"]
    assert summary["partner_recovery"] == 1.0
    assert summary["ari"] < 1.0

    report = ClusterAnalyzer().generate_executive_summary(summary)
    assert "3 clusters" in report
    assert "core: x1" in report
