"""
Модуль метрик качества: ошибка кластеризации (CE), ошибка оценки числа
подпространств (EL), ошибка обнаружения признаков (FDE), свойство обнаружения
подпространств, аффинности и главные углы между подпространствами
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .datamodel import OUTLIER_LABEL
from .errors import LengthMismatchError, NotOrthonormalError
from .spectral import AdjacencyGraph, ClusterResult

ORTHONORMAL_TOL = 1e-8


@dataclass
class MetricsReport:
    """Метрики одного испытания."""

    ce: float
    el: int
    fde: float
    detection_property_holds: bool
    max_affp: float = 0.0
    max_aff: float = 0.0


def _as_labels(predicted: Sequence[int], truth: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise LengthMismatchError(f"Длины меток различаются: {predicted.shape} и {truth.shape}")
    return predicted, truth


def _confusion_matrix(predicted: np.ndarray, truth: np.ndarray) -> np.ndarray:
    _, truth_idx = np.unique(truth, return_inverse=True)
    _, pred_idx = np.unique(predicted, return_inverse=True)
    confusion = np.zeros((truth_idx.max() + 1, pred_idx.max() + 1), dtype=np.int64)
    np.add.at(confusion, (truth_idx, pred_idx), 1)
    return confusion


def clustering_error(predicted: Sequence[int], truth: Sequence[int]) -> float:
    """Доля неверно классифицированных точек при оптимальном сопоставлении кластеров.

    Метка -1 образует собственный класс и сопоставляется только с -1.
    """
    predicted, truth = _as_labels(predicted, truth)
    total = truth.shape[0]
    if total == 0:
        return 0.0

    pred_outlier = predicted == OUTLIER_LABEL
    true_outlier = truth == OUTLIER_LABEL
    errors = int(np.sum(pred_outlier != true_outlier))

    both = ~pred_outlier & ~true_outlier
    if np.any(both):
        confusion = _confusion_matrix(predicted[both], truth[both])
        # прямоугольная матрица эквивалентна дополнению нулями до квадратной
        rows, cols = linear_sum_assignment(-confusion)
        matched = int(confusion[rows, cols].sum())
        errors += int(both.sum()) - matched
    return errors / total


def estimation_error(l_hat: int, n_subspaces: int) -> int:
    """0, если число подпространств оценено верно, иначе 1."""
    return 0 if int(l_hat) == int(n_subspaces) else 1


def feature_detection_error(adjacency: AdjacencyGraph, truth: Sequence[int]) -> float:
    """(1/N) Σ_i (1 − ‖b_{x_i}‖₂ / ‖b_i‖₂); нулевой столбец даёт слагаемое 1."""
    a = adjacency.matrix
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape[0] != a.shape[0]:
        raise LengthMismatchError(f"{truth.shape[0]} меток для графа из {a.shape[0]} вершин")
    if np.any(truth == OUTLIER_LABEL):
        raise ValueError("FDE вычисляется только после удаления выбросов")
    if truth.shape[0] == 0:
        return 0.0

    same = truth[:, None] == truth[None, :]
    column_norms = np.linalg.norm(a, axis=0)
    within_norms = np.linalg.norm(np.where(same, a, 0.0), axis=0)

    terms = np.ones_like(column_norms)
    nonzero = column_norms > 0
    terms[nonzero] = 1.0 - within_norms[nonzero] / column_norms[nonzero]
    return float(np.mean(terms))


def check_subspace_detection_property(adjacency: AdjacencyGraph, truth: Sequence[int], q: int) -> bool:
    """Ненулевые A_ij только внутри подпространств и у каждой точки ≥ q таких связей."""
    a = adjacency.matrix
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape[0] != a.shape[0]:
        raise LengthMismatchError(f"{truth.shape[0]} меток для графа из {a.shape[0]} вершин")

    nonzero = a != 0
    same = truth[:, None] == truth[None, :]
    if np.any(nonzero & ~same):
        return False
    return bool(np.all((nonzero & same).sum(axis=1) >= q))


def _check_orthonormal(basis: np.ndarray) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim != 2:
        raise NotOrthonormalError(f"Ожидается матрица m×d, получено {basis.shape}")
    gram_error = np.abs(basis.T @ basis - np.eye(basis.shape[1]))
    if gram_error.size and gram_error.max() > ORTHONORMAL_TOL:
        raise NotOrthonormalError(f"UᵀU отличается от I на {gram_error.max():.3e}")
    return basis


def _cross_singular_values(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = _check_orthonormal(u)
    v = _check_orthonormal(v)
    if u.shape[0] != v.shape[0]:
        raise ValueError(f"Разные объемлющие размерности: {u.shape[0]} и {v.shape[0]}")
    return scipy.linalg.svdvals(u.T @ v)


def principal_angles(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Главные углы θ_1 ≤ ... ≤ θ_d между подпространствами span(U) и span(V)."""
    singular_values = np.clip(_cross_singular_values(u, v), 0.0, 1.0)
    return np.sort(np.arccos(singular_values))


def affinity_affp(u: np.ndarray, v: np.ndarray) -> float:
    """affp = ‖UᵀV‖_{2→2} = cos θ_1."""
    singular_values = _cross_singular_values(u, v)
    return float(singular_values.max()) if singular_values.size else 0.0


def affinity_aff(u: np.ndarray, v: np.ndarray) -> float:
    """aff = ‖UᵀV‖_F / √d."""
    u = _check_orthonormal(u)
    v = _check_orthonormal(v)
    if u.shape != v.shape:
        raise ValueError(f"aff определена для подпространств равной размерности: {u.shape} и {v.shape}")
    return float(np.linalg.norm(u.T @ v, "fro") / math.sqrt(u.shape[1]))


def max_affinities(bases: Sequence[np.ndarray]) -> Tuple[float, float]:
    """Максимальные affp и aff по всем парам подпространств."""
    max_affp = 0.0
    max_aff = 0.0
    for u, v in combinations(bases, 2):
        max_affp = max(max_affp, affinity_affp(u, v))
        max_aff = max(max_aff, affinity_aff(u, v))
    return max_affp, max_aff


def check_affinity_condition(bases: Sequence[np.ndarray], n_points: int) -> bool:
    """max_{k≠l} aff(S_k, S_l) ≤ 1/(13·ln N)."""
    if len(bases) < 2:
        raise ValueError("Нужно не менее двух подпространств")
    if n_points < 2:
        raise ValueError(f"Требуется N ≥ 2: {n_points}")
    _, max_aff = max_affinities(bases)
    return max_aff <= 1.0 / (13.0 * math.log(n_points))


def check_outlier_condition(d: int, m: int, n_points: int) -> bool:
    """d/m ≤ 1/(6·ln N)."""
    if d < 1 or m < 1 or n_points < 2:
        raise ValueError(f"Требуются d, m ≥ 1 и N ≥ 2: d={d}, m={m}, N={n_points}")
    return d / m <= 1.0 / (6.0 * math.log(n_points))


def outlier_misclassification_rate(flags: Sequence[bool], truth: Sequence[int]) -> float:
    """Доля точек, для которых решение «выброс» не совпадает с истинным."""
    flags = np.asarray(flags, dtype=bool)
    truth = np.asarray(truth, dtype=np.int64)
    if flags.shape != truth.shape:
        raise LengthMismatchError(f"{flags.shape[0]} флагов для {truth.shape[0]} меток")
    if flags.size == 0:
        return 0.0
    return float(np.mean(flags != (truth == OUTLIER_LABEL)))


def evaluate_clustering(
    result: ClusterResult,
    truth: Sequence[int],
    q: int,
    bases: Optional[Sequence[np.ndarray]] = None,
) -> MetricsReport:
    """Сводка метрик для результата кластеризации относительно истинных меток."""
    truth = np.asarray(truth, dtype=np.int64)
    ce = clustering_error(result.labels, truth)
    n_subspaces = int(np.unique(truth[truth != OUTLIER_LABEL]).size)
    el = estimation_error(result.l_hat, n_subspaces)

    # граф построен только по точкам, не отмеченным как выбросы
    graph_truth = truth[result.inlier_mask]
    keep = graph_truth != OUTLIER_LABEL
    graph = AdjacencyGraph(result.adjacency.matrix[np.ix_(keep, keep)])
    fde = feature_detection_error(graph, graph_truth[keep])
    sdp = check_subspace_detection_property(graph, graph_truth[keep], q)

    max_affp, max_aff = max_affinities(bases) if bases is not None else (0.0, 0.0)
    return MetricsReport(
        ce=ce,
        el=el,
        fde=fde,
        detection_property_holds=sdp,
        max_affp=max_affp,
        max_aff=max_aff,
    )
