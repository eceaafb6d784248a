"""
Модуль обнаружения выбросов по максимальной корреляции точки с остальными
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datamodel import OUTLIER_LABEL, DataSet, normalize_rows
from .errors import EmptyAfterRemovalError, TooFewPointsError
from .spectral import ClusterResult
from .tsc_core import TscOptions, correlation_magnitudes, tsc_cluster

logger = logging.getLogger(__name__)


@dataclass
class OutlierReport:
    """flags[j] истинно, если max_{p≠j} |<x_p, x_j>| < threshold."""

    flags: np.ndarray
    threshold: float
    max_correlations: np.ndarray

    @property
    def n_flagged(self) -> int:
        return int(self.flags.sum())


def outlier_threshold(n_points: float, dim: int) -> float:
    """Порог √(6·ln N)/√m."""
    if n_points < 2 or dim < 1:
        raise TooFewPointsError(f"Требуется N ≥ 2 и m ≥ 1, получено N={n_points}, m={dim}")
    return math.sqrt(6.0 * math.log(n_points)) / math.sqrt(dim)


def max_detectable_outliers(dim: int, subspace_dim: int, n_subspaces: int, points_per_subspace: int) -> float:
    """Наибольшее N0, при котором выполнено d/m ≤ 1/(6·ln N): N0 ≤ e^{m/(6d)} − L·n."""
    try:
        bound = math.exp(dim / (6.0 * subspace_dim))
    except OverflowError:
        return math.inf
    return float(max(0, math.floor(bound - n_subspaces * points_per_subspace)))


def detect_outliers(data: DataSet) -> OutlierReport:
    """Отметка точек, максимальная корреляция которых ниже порога (строгое неравенство)."""
    if data.n_points < 2:
        raise TooFewPointsError("Для обнаружения выбросов нужно не менее двух точек")
    data = normalize_rows(data)

    gram = correlation_magnitudes(data.points)
    np.fill_diagonal(gram, -np.inf)
    max_correlations = gram.max(axis=1)

    threshold = outlier_threshold(data.n_points, data.dim)
    flags = max_correlations < threshold
    logger.debug("Выбросы: %d из %d, порог %.6g", int(flags.sum()), data.n_points, threshold)
    return OutlierReport(flags=flags, threshold=threshold, max_correlations=max_correlations)


def cluster_with_outliers(
    data: DataSet,
    q: int,
    options: Optional[TscOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> ClusterResult:
    """Удаление выбросов, кластеризация оставшихся точек и возврат меток в исходной нумерации."""
    report = detect_outliers(data)
    inliers = np.flatnonzero(~report.flags)
    if inliers.size == 0:
        raise EmptyAfterRemovalError(f"Все {data.n_points} точек отмечены как выбросы")

    result = tsc_cluster(data.subset(inliers), q, options, rng)

    labels = np.full(data.n_points, OUTLIER_LABEL, dtype=np.int64)
    labels[inliers] = result.labels
    return ClusterResult(
        labels=labels,
        l_hat=result.l_hat,
        spectrum=result.spectrum,
        adjacency=result.adjacency,
        outliers=report.flags.copy(),
    )
