import numpy as np
import pytest

from src.clustering import NOISE, ClusterAssignment, DbscanConfig, adjusted_rand_index, dbscan
from src.errors import ConfigError, DataError


def reference_dbscan(points, eps, min_pts):
    """Textbook DBSCAN: ascending-index seeds, closed eps-ball, -1 for noise."""
    m = len(points)
    dist = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    neighbors = [np.flatnonzero(dist[i] <= eps) for i in range(m)]
    core = [len(n) >= min_pts for n in neighbors]
    labels = np.full(m, NOISE)
    cluster = 0
    for i in range(m):
        if labels[i] != NOISE or not core[i]:
            continue
        labels[i] = cluster
        stack = [i]
        while stack:
            p = stack.pop()
            if not core[p]:
                continue
            for q in neighbors[p]:
                if labels[q] == NOISE:
                    labels[q] = cluster
                    stack.append(q)
        cluster += 1
    return labels


def _same_partition(a, b):
    """Identical up to renaming of cluster ids, noise matched exactly."""
    if not np.array_equal(a == NOISE, b == NOISE):
        return False
    mapping = {}
    for x, y in zip(a, b):
        if x == NOISE:
            continue
        if mapping.setdefault(x, y) != y:
            return False
    return len(set(mapping.values())) == len(mapping)


def test_matches_reference_on_random_instances():
    for seed in range(200):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 51))
        d = int(rng.integers(1, 4))
        points = rng.random((m, d))
        eps = float(rng.uniform(0.05, 0.4))
        min_pts = int(rng.integers(1, 5))

        got = dbscan(points, DbscanConfig(eps, min_pts)).labels
        want = reference_dbscan(points, eps, min_pts)
        assert _same_partition(got, want), f"seed {seed}"
        if min_pts == 1:
            assert not np.any(got == NOISE)


def test_cluster_ids_follow_discovery_order():
    points = np.array([[0.0], [10.0], [0.1], [10.1], [20.0]])
    result = dbscan(points, DbscanConfig(eps=0.5, min_pts=1))
    np.testing.assert_array_equal(result.labels, [0, 1, 0, 1, 2])
    assert result.n_clusters == 3
    assert result.n_noise == 0


def test_boundary_distance_is_inside_the_ball():
    points = np.array([[0.0, 0.0], [0.5, 0.0]])
    assert dbscan(points, DbscanConfig(eps=0.5, min_pts=2)).n_clusters == 1


def test_noise_points():
    points = np.array([[0.0], [0.1], [0.2], [5.0]])
    result = dbscan(points, DbscanConfig(eps=0.15, min_pts=2))
    assert result.labels[3] == NOISE
    assert result.members(0) == [0, 1, 2]


def test_invalid_inputs():
    with pytest.raises(ConfigError):
        DbscanConfig(eps=0.0)
    with pytest.raises(ConfigError):
        DbscanConfig(min_pts=0)
    with pytest.raises(DataError):
        dbscan(np.array([[np.nan, 0.0]]))


def test_ari_identical_partitions_up_to_relabeling():
    a = ClusterAssignment(np.array([0, 0, 1, 1, 2]))
    b = ClusterAssignment(np.array([5, 5, 3, 3, 9]))
    assert adjusted_rand_index(a, b) == pytest.approx(1.0)


def test_ari_is_symmetric_and_at_most_one():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 3, 30)
    b = rng.integers(0, 4, 30)
    assert adjusted_rand_index(a, b) == pytest.approx(adjusted_rand_index(b, a))
    assert adjusted_rand_index(a, b) <= 1.0


def test_ari_length_mismatch():
    with pytest.raises(DataError):
        adjusted_rand_index(np.array([0, 1]), np.array([0, 1, 1]))


def test_partition_invariant_under_point_reordering():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        points = rng.random((30, 2))
        perm = rng.permutation(30)
        cfg = DbscanConfig(0.15, 1)

        original = dbscan(points, cfg).labels
        reordered = dbscan(points[perm], cfg).labels
        assert _same_partition(original[perm], reordered), f"seed {seed}"
        assert adjusted_rand_index(original[perm], reordered) == pytest.approx(1.0)


def test_ari_singletons_against_one_cluster_is_zero():
    assert adjusted_rand_index(np.arange(16), np.zeros(16, dtype=int)) == pytest.approx(0.0)
