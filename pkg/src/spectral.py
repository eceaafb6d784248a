"""
Модуль спектральной части алгоритма: нормированный лапласиан, оценка числа
подпространств по собственному разрыву, спектральное вложение и k-means
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from .datamodel import SymmetricSpectrum, symmetric_eig

logger = logging.getLogger(__name__)

DEFAULT_KMEANS_RESTARTS = 10
DEFAULT_KMEANS_MAX_ITER = 100


@dataclass
class AdjacencyGraph:
    """Симметричная неотрицательная матрица смежности с нулевой диагональю."""

    matrix: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1)


@dataclass
class ClusterResult:
    """Результат кластеризации.

    labels: метки 0..l_hat-1 (или -1 для точек, отмеченных как выбросы);
    spectrum и adjacency относятся к точкам, не отмеченным как выбросы.
    """

    labels: np.ndarray
    l_hat: int
    spectrum: SymmetricSpectrum
    adjacency: AdjacencyGraph
    outliers: Optional[np.ndarray] = None

    @property
    def inlier_mask(self) -> np.ndarray:
        if self.outliers is None:
            return np.ones(self.labels.shape[0], dtype=bool)
        return ~self.outliers


def default_max_clusters(n_points: int) -> int:
    """Верхняя граница поиска разрыва по умолчанию: ⌊N/2⌋, но не меньше 1."""
    return max(1, n_points // 2)


def normalized_laplacian(adjacency: AdjacencyGraph) -> np.ndarray:
    """L_sym = I − D^{-1/2} A D^{-1/2}; для вершин нулевой степени D^{-1/2} = 0."""
    a = adjacency.matrix
    degrees = a.sum(axis=1)
    inv_sqrt = np.zeros_like(degrees)
    positive = degrees > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degrees[positive])

    laplacian = np.eye(a.shape[0]) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    return (laplacian + laplacian.T) / 2.0


def estimate_cluster_count(spectrum: SymmetricSpectrum, max_clusters: int) -> int:
    """L̂ = argmax_{i=1..max_clusters} (λ_{i+1} − λ_i); при равенстве - наименьший i."""
    eigenvalues = spectrum.eigenvalues
    if not 1 <= max_clusters <= eigenvalues.shape[0] - 1:
        raise ValueError(
            f"max_clusters={max_clusters} вне диапазона [1, {eigenvalues.shape[0] - 1}]"
        )
    gaps = np.diff(eigenvalues[: max_clusters + 1])
    return int(np.argmax(gaps)) + 1


def spectral_embedding(
    adjacency: AdjacencyGraph, l_hat: int, spectrum: Optional[SymmetricSpectrum] = None
) -> np.ndarray:
    """Собственные векторы L_sym для l_hat наименьших собственных значений, строки нормированы."""
    if l_hat < 1:
        raise ValueError(f"l_hat должно быть ≥ 1: {l_hat}")
    if spectrum is None:
        spectrum = symmetric_eig(normalized_laplacian(adjacency))

    embedding = spectrum.eigenvectors[:, :l_hat].copy()
    norms = np.linalg.norm(embedding, axis=1)
    nonzero = norms > 0
    embedding[nonzero] /= norms[nonzero, None]
    return embedding


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Перенумерация кластеров в порядке первого появления."""
    _, first_seen = np.unique(labels, return_index=True)
    order = np.argsort(first_seen)
    mapping = np.empty(order.shape[0], dtype=np.int64)
    mapping[order] = np.arange(order.shape[0])
    _, inverse = np.unique(labels, return_inverse=True)
    return mapping[inverse]


def kmeans(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    restarts: int = DEFAULT_KMEANS_RESTARTS,
    max_iter: int = DEFAULT_KMEANS_MAX_ITER,
) -> np.ndarray:
    """k-means с инициализацией k-means++; лучший из restarts запусков по сумме квадратов."""
    points = np.asarray(points, dtype=np.float64)
    if k < 1 or points.shape[0] < k:
        raise ValueError(f"Требуется 1 ≤ k ≤ N, получено k={k}, N={points.shape[0]}")
    if k == 1:
        return np.zeros(points.shape[0], dtype=np.int64)

    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=restarts,
        max_iter=max_iter,
        random_state=int(rng.integers(0, 2**31 - 1)),
    )
    with warnings.catch_warnings():
        # пустые кластеры восстанавливаются ниже
        warnings.simplefilter("ignore", ConvergenceWarning)
        labels = model.fit_predict(points)

    labels = _repair_empty_clusters(points, labels, model.cluster_centers_.copy(), k)
    logger.debug("k-means: k=%d, inertia=%.6g, iterations=%d", k, model.inertia_, model.n_iter_)
    return _canonical_labels(labels)


def _repair_empty_clusters(points: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    """Каждому пустому кластеру отдаётся самая далёкая от своего центра точка
    из кластера, в котором больше одной точки.

    При равных расстояниях берётся точка с меньшим индексом.
    """
    labels = np.asarray(labels, dtype=np.int64).copy()
    for empty in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[empty] > 0:
            continue
        distances = np.linalg.norm(points - centers[labels], axis=1)
        distances[counts[labels] < 2] = -np.inf
        donor = int(np.argmax(distances))
        logger.debug("k-means: пустой кластер %d, перенесена точка %d", empty, donor)
        labels[donor] = empty
        centers[empty] = points[donor]
    return labels


def normalized_spectral_clustering(
    adjacency: AdjacencyGraph,
    l_hat: int,
    rng: np.random.Generator,
    spectrum: Optional[SymmetricSpectrum] = None,
    restarts: int = DEFAULT_KMEANS_RESTARTS,
    max_iter: int = DEFAULT_KMEANS_MAX_ITER,
) -> ClusterResult:
    """Нормированная спектральная кластеризация графа на l_hat кластеров."""
    if spectrum is None:
        spectrum = symmetric_eig(normalized_laplacian(adjacency))
    embedding = spectral_embedding(adjacency, l_hat, spectrum)
    labels = kmeans(embedding, l_hat, rng, restarts=restarts, max_iter=max_iter)
    return ClusterResult(labels=labels, l_hat=l_hat, spectrum=spectrum, adjacency=adjacency)
