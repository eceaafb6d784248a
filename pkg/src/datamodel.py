"""
Модуль базовых структур данных, детерминированных генераторов случайных чисел
и общих численных утилит
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailureError, ZeroPointError

logger = logging.getLogger(__name__)

ZERO_NORM_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-8
SYMMETRY_TOL = 1e-10

OUTLIER_LABEL = -1

# Назначения потоков случайных чисел (последний элемент пути SeedSequence)
PURPOSE_BASES = 0
PURPOSE_COEFFICIENTS = 1
PURPOSE_ERASURES = 2
PURPOSE_OUTLIERS = 3
PURPOSE_SHUFFLE = 4
PURPOSE_KMEANS = 5


@dataclass(frozen=True)
class Seed:
    """Зерно генератора: 64-битное беззнаковое целое."""

    value: int = 0

    def __post_init__(self):
        if not 0 <= int(self.value) < 2**64:
            raise ValueError(f"Зерно должно быть в диапазоне [0, 2^64): {self.value}")

    def stream(self, *path: int) -> np.random.Generator:
        """Независимый поток случайных чисел для заданного пути (испытание, назначение, ...)."""
        sequence = np.random.SeedSequence(entropy=int(self.value), spawn_key=tuple(int(p) for p in path))
        return np.random.Generator(np.random.PCG64(sequence))

    def derive(self, *path: int) -> "Seed":
        """Производное зерно для пути; не зависит от порядка вызовов."""
        return Seed(derive_seed(self.value, *path))


def derive_seed(seed: int, *path: int) -> int:
    """Детерминированно выводит 64-битное зерно из (seed, path)."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass
class DataSet:
    """Набор из N точек в R^m (по одной точке в строке) с необязательными метками."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError(f"Ожидается матрица N×m с N, m ≥ 1, получено {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ValueError("Матрица точек содержит нечисловые значения")
        self.points = points

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != points.shape[0]:
                raise ValueError(f"Длина меток {labels.shape} не совпадает с N={points.shape[0]}")
            if labels.size and not np.issubdtype(labels.dtype, np.integer):
                if not np.all(np.equal(np.mod(labels, 1), 0)):
                    raise ValueError("Метки должны быть целыми числами")
            labels = labels.astype(np.int64)
            if np.any(labels < OUTLIER_LABEL):
                raise ValueError("Метки должны быть ≥ 0 или равны -1 (выброс)")
            self.labels = labels

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def n_subspaces(self) -> int:
        """Число подпространств L по меткам (без учёта выбросов)."""
        if self.labels is None:
            return 0
        inliers = self.labels[self.labels != OUTLIER_LABEL]
        return int(inliers.max()) + 1 if inliers.size else 0

    @property
    def outlier_mask(self) -> np.ndarray:
        if self.labels is None:
            return np.zeros(self.n_points, dtype=bool)
        return self.labels == OUTLIER_LABEL

    def subset(self, indices: Sequence[int]) -> "DataSet":
        """Подмножество точек (и меток) по индексам."""
        idx = np.asarray(indices, dtype=np.int64)
        labels = self.labels[idx] if self.labels is not None else None
        return DataSet(self.points[idx], labels)


@dataclass
class SymmetricSpectrum:
    """Собственные значения по возрастанию и соответствующие ортонормированные векторы."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def smallest(self, count: int) -> np.ndarray:
        return self.eigenvalues[:count]


def normalize_rows(data: DataSet) -> DataSet:
    """Нормирование каждой точки на единичную евклидову норму."""
    norms = np.linalg.norm(data.points, axis=1)
    zero_rows = np.flatnonzero(norms < ZERO_NORM_TOL)
    if zero_rows.size:
        raise ZeroPointError(zero_rows.tolist())
    return DataSet(data.points / norms[:, None], data.labels)


def sample_gaussian_vector(dim: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Вектор из dim независимых N(0, variance) компонент."""
    if dim < 1:
        raise ValueError(f"Размерность должна быть ≥ 1: {dim}")
    if variance <= 0:
        raise ValueError(f"Дисперсия должна быть положительной: {variance}")
    return rng.normal(0.0, np.sqrt(variance), size=dim)


def sample_unit_sphere(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Равномерно распределённый вектор на единичной сфере R^dim."""
    if dim < 1:
        raise ValueError(f"Размерность должна быть ≥ 1: {dim}")
    while True:
        g = rng.standard_normal(dim)
        norm = np.linalg.norm(g)
        if norm > ZERO_NORM_TOL:
            return g / norm


def sample_unit_sphere_rows(count: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """count независимых равномерных точек на сфере, по одной в строке."""
    if count == 0:
        return np.empty((0, dim))
    return np.vstack([sample_unit_sphere(dim, rng) for _ in range(count)])


def symmetric_eig(matrix: np.ndarray) -> SymmetricSpectrum:
    """Полное спектральное разложение симметричной матрицы с проверкой невязки."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"Ожидается квадратная матрица, получено {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("Матрица не симметрична")

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(m, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceFailureError(f"eigh не сошёлся: {e}") from e

    scale = max(EIG_RESIDUAL_TOL * np.linalg.norm(m, "fro"), np.finfo(np.float64).tiny)
    residual = np.linalg.norm(m @ eigenvectors - eigenvectors * eigenvalues, axis=0)
    if residual.size and residual.max() > scale:
        raise ConvergenceFailureError(f"Невязка {residual.max():.3e} превышает {scale:.3e}")

    gram_error = np.abs(eigenvectors.T @ eigenvectors - np.eye(m.shape[0]))
    if gram_error.size and gram_error.max() > EIG_RESIDUAL_TOL:
        raise ConvergenceFailureError(f"Собственные векторы не ортонормированы: {gram_error.max():.3e}")

    logger.debug("eigh: n=%d, λ_min=%.3g, λ_max=%.3g", m.shape[0], eigenvalues[0], eigenvalues[-1])
    return SymmetricSpectrum(eigenvalues, eigenvectors)
