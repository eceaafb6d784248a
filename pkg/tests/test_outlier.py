import math

import numpy as np
import pytest

from src.datamodel import DataSet
from src.errors import EmptyAfterRemovalError, TooFewPointsError
from src.metrics import check_outlier_condition, clustering_error
from src.outlier import (
    cluster_with_outliers,
    detect_outliers,
    max_detectable_outliers,
    outlier_threshold,
)
from src.synthgen import BasisModel, SyntheticSpec, generate_dataset
from src.tsc_core import TscOptions, tsc_cluster


def test_threshold_values():
    assert outlier_threshold(100, 50) == pytest.approx(0.7434, abs=1e-4)
    assert outlier_threshold(math.e, 6) == pytest.approx(1.0)


def test_threshold_validation():
    with pytest.raises(ValueError):
        outlier_threshold(1, 10)
    with pytest.raises(ValueError):
        outlier_threshold(10, 0)


def test_duplicates_kept_orthogonal_point_flagged():
    points = np.zeros((5, 20))
    points[0, 0] = points[1, 0] = 1.0
    points[2, 1] = points[3, 1] = 2.0
    points[4, 2] = 1.0
    report = detect_outliers(DataSet(points))
    assert report.threshold < 1.0
    np.testing.assert_array_equal(report.flags, [False, False, False, False, True])
    np.testing.assert_allclose(report.max_correlations, [1.0, 1.0, 1.0, 1.0, 0.0])
    assert report.n_flagged == 1


def test_detect_requires_two_points():
    with pytest.raises(TooFewPointsError):
        detect_outliers(DataSet(np.ones((1, 3))))


def test_all_orthogonal_points_empty_after_removal():
    with pytest.raises(EmptyAfterRemovalError):
        cluster_with_outliers(DataSet(np.eye(20)[:5]), 1)


def test_no_outliers_matches_plain_clustering():
    spec = SyntheticSpec(m=50, n_subspaces=2, d=2, n=50, basis_model=BasisModel.COORDINATE_BLOCKS, seed=2)
    data, truth = generate_dataset(spec)
    with_detection = cluster_with_outliers(data, 5, TscOptions(seed=1))
    plain = tsc_cluster(data, 5, TscOptions(seed=1))
    assert not with_detection.outliers.any()
    np.testing.assert_array_equal(with_detection.labels, plain.labels)
    assert with_detection.l_hat == plain.l_hat


def _orthogonal_pair_with_outliers(seed: int):
    spec = SyntheticSpec(
        m=100, n_subspaces=2, d=3, n=30, basis_model=BasisModel.COORDINATE_BLOCKS, n_outliers=10, seed=seed
    )
    return generate_dataset(spec)


def test_outliers_removed_before_clustering():
    data, truth = _orthogonal_pair_with_outliers(8)
    result = cluster_with_outliers(data, 10, TscOptions(seed=8))
    np.testing.assert_array_equal(result.outliers, truth.labels == -1)
    np.testing.assert_array_equal(result.labels[-10:], -1)
    assert result.adjacency.n_points == 60
    np.testing.assert_array_equal(result.inlier_mask, truth.labels != -1)


def test_outlier_removal_success_rate():
    successes = 0
    for seed in range(50):
        data, truth = _orthogonal_pair_with_outliers(seed)
        result = cluster_with_outliers(data, 10, TscOptions(seed=seed))
        outliers_found = np.array_equal(result.outliers, truth.labels == -1)
        successes += outliers_found and result.l_hat == 2 and clustering_error(result.labels, truth.labels) == 0.0
    assert successes / 50 >= 0.9


def test_max_detectable_outliers():
    assert max_detectable_outliers(50, 5, 20, 25) == 0
    budget = max_detectable_outliers(600, 5, 240, 25)
    assert budget > 0
    assert check_outlier_condition(5, 600, int(240 * 25 + budget))
    assert math.isinf(max_detectable_outliers(10**6, 1, 2, 2))
