"""
Модуль порогового отбора корреляций и построения матрицы смежности
(шаг 1 алгоритма), а также сквозной конвейер кластеризации
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .datamodel import PURPOSE_KMEANS, DataSet, Seed, normalize_rows, symmetric_eig
from .errors import InvalidClusterCountError, InvalidQError
from .spectral import (
    DEFAULT_KMEANS_MAX_ITER,
    DEFAULT_KMEANS_RESTARTS,
    AdjacencyGraph,
    ClusterResult,
    default_max_clusters,
    estimate_cluster_count,
    normalized_laplacian,
    normalized_spectral_clustering,
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-8


@dataclass
class NeighborSelection:
    """Множества S_j и векторы z_j для всех точек.

    neighbors[j] - индексы q точек с наибольшей |<x_j, x_i>| в порядке убывания;
    magnitudes[j, i] = [z_j]_i.
    """

    neighbors: np.ndarray
    magnitudes: np.ndarray

    @property
    def q(self) -> int:
        return int(self.neighbors.shape[1])

    @property
    def n_points(self) -> int:
        return int(self.neighbors.shape[0])


@dataclass
class TscOptions:
    """Параметры конвейера TSC."""

    n_clusters: Optional[int] = None
    max_clusters: Optional[int] = None
    normalize: bool = True
    kmeans_restarts: int = DEFAULT_KMEANS_RESTARTS
    kmeans_max_iter: int = DEFAULT_KMEANS_MAX_ITER
    seed: int = 0


def correlation_magnitudes(points: np.ndarray) -> np.ndarray:
    """Матрица |<x_i, x_j>| для всех пар точек."""
    return np.abs(points @ points.T)


def select_neighbors(data: DataSet, q: int) -> NeighborSelection:
    """Отбор q наиболее коррелированных соседей для каждой точки.

    При равенстве корреляций на границе отбора предпочитается меньший индекс.
    """
    n_points = data.n_points
    if q < 1 or q > n_points - 1:
        raise InvalidQError(q, n_points)

    gram = correlation_magnitudes(data.points)
    ranking = -gram
    np.fill_diagonal(ranking, np.inf)
    # устойчивая сортировка сохраняет порядок индексов среди равных значений
    neighbors = np.argsort(ranking, axis=1, kind="stable")[:, :q]

    rows = np.arange(n_points)[:, None]
    magnitudes = np.zeros_like(gram)
    magnitudes[rows, neighbors] = gram[rows, neighbors]
    return NeighborSelection(neighbors=neighbors, magnitudes=magnitudes)


def build_adjacency(selection: NeighborSelection) -> AdjacencyGraph:
    """A_ij = [z_j]_i + [z_i]_j; симметрична по построению."""
    z = selection.magnitudes
    matrix = z + z.T
    np.fill_diagonal(matrix, 0.0)
    return AdjacencyGraph(matrix)


def _resolve_rng(options: TscOptions, rng: Optional[np.random.Generator]) -> np.random.Generator:
    if rng is not None:
        return rng
    return Seed(options.seed).stream(PURPOSE_KMEANS)


def tsc_cluster(
    data: DataSet,
    q: int,
    options: Optional[TscOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> ClusterResult:
    """Полный конвейер TSC: нормирование, отбор соседей, смежность, оценка L̂, спектральная кластеризация."""
    options = options or TscOptions()
    if options.normalize:
        data = normalize_rows(data)

    selection = select_neighbors(data, q)
    adjacency = build_adjacency(selection)
    spectrum = symmetric_eig(normalized_laplacian(adjacency))

    if options.n_clusters is not None:
        l_hat = int(options.n_clusters)
        if not 1 <= l_hat <= data.n_points:
            raise InvalidClusterCountError(f"Число кластеров {l_hat} вне диапазона [1, {data.n_points}]")
    else:
        if options.max_clusters is None:
            max_clusters = default_max_clusters(data.n_points)
        elif options.max_clusters < 1:
            raise InvalidClusterCountError(f"Граница поиска разрыва должна быть ≥ 1: {options.max_clusters}")
        else:
            max_clusters = int(options.max_clusters)
        max_clusters = min(max_clusters, data.n_points - 1)
        l_hat = estimate_cluster_count(spectrum, max_clusters)

    logger.debug("TSC: N=%d, q=%d, L̂=%d", data.n_points, q, l_hat)
    return normalized_spectral_clustering(
        adjacency,
        l_hat,
        _resolve_rng(options, rng),
        spectrum=spectrum,
        restarts=options.kmeans_restarts,
        max_iter=options.kmeans_max_iter,
    )


def extract_subspaces(
    data: DataSet, labels: Sequence[int], d: Union[int, Sequence[int], None] = None
) -> List[np.ndarray]:
    """Оценка ортонормированного базиса подпространства каждого кластера через SVD.

    d - общая размерность, список размерностей по кластерам или None
    (численный ранг точек кластера).
    """
    labels = np.asarray(labels)
    cluster_ids = sorted(int(c) for c in np.unique(labels) if c >= 0)
    bases = []
    for position, cluster in enumerate(cluster_ids):
        members = data.points[labels == cluster]
        u, singular_values, _ = scipy.linalg.svd(members.T, full_matrices=False)
        if d is None:
            top = singular_values[0] if singular_values.size else 0.0
            dim = int(np.sum(singular_values > RANK_TOL * top)) if top > 0 else 0
        elif isinstance(d, (int, np.integer)):
            dim = int(d)
        else:
            dim = int(d[position])
        if dim > u.shape[1]:
            raise ValueError(f"Кластер {cluster}: размерность {dim} больше числа точек {u.shape[1]}")
        bases.append(u[:, :dim])
    return bases
