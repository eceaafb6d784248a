"""
Модуль генерации синтетических данных: объединения подпространств,
стирания координат и равномерные на сфере выбросы
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from .datamodel import (
    OUTLIER_LABEL,
    PURPOSE_BASES,
    PURPOSE_COEFFICIENTS,
    PURPOSE_ERASURES,
    PURPOSE_OUTLIERS,
    PURPOSE_SHUFFLE,
    ZERO_NORM_TOL,
    DataSet,
    Seed,
    sample_unit_sphere_rows,
)
from .errors import ConfigError, DegenerateErasureError

logger = logging.getLogger(__name__)


class CoefficientModel(str, Enum):
    GAUSSIAN_INV_D = "gaussian_inv_d"
    SPHERE_UNIFORM = "sphere_uniform"


class BasisModel(str, Enum):
    HAAR_ORTHONORMAL = "haar_orthonormal"
    GAUSSIAN_INV_M = "gaussian_inv_m"
    COORDINATE_BLOCKS = "coordinate_blocks"


@dataclass(frozen=True)
class SyntheticSpec:
    """Параметры синтетической модели данных."""

    m: int
    n_subspaces: int
    d: int
    n: int
    coefficient_model: CoefficientModel = CoefficientModel.SPHERE_UNIFORM
    basis_model: BasisModel = BasisModel.HAAR_ORTHONORMAL
    s: int = 0
    n_outliers: int = 0
    seed: int = 0
    shuffle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coefficient_model", CoefficientModel(self.coefficient_model))
        object.__setattr__(self, "basis_model", BasisModel(self.basis_model))
        self.validate()

    def validate(self) -> None:
        if self.m < 1 or self.d < 1 or self.n < 1 or self.n_subspaces < 1:
            raise ConfigError("m, d, n и L должны быть положительными")
        if self.d > self.m:
            raise ConfigError(f"d={self.d} больше m={self.m}")
        if not 0 <= self.s < self.m:
            raise ConfigError(f"Число стираний s={self.s} должно быть в [0, m)")
        if self.n_outliers < 0:
            raise ConfigError("Число выбросов не может быть отрицательным")
        if self.basis_model == BasisModel.COORDINATE_BLOCKS and self.n_subspaces * self.d > self.m:
            raise ConfigError(f"Координатные блоки требуют L·d ≤ m ({self.n_subspaces}·{self.d} > {self.m})")

    @property
    def n_inliers(self) -> int:
        return self.n_subspaces * self.n

    @property
    def n_points(self) -> int:
        return self.n_inliers + self.n_outliers


@dataclass
class SyntheticGroundTruth:
    """Истинная структура сгенерированного набора.

    coefficients[j] - коэффициенты a_j точки j в базисе её подпространства
    (нулевая строка для выбросов); erasure_masks[j] - стёртые индексы точки j.
    """

    bases: List[np.ndarray]
    coefficients: np.ndarray
    labels: np.ndarray
    erasure_masks: np.ndarray
    outlier_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    raw_points: Optional[np.ndarray] = field(default=None, repr=False)


def random_orthonormal_basis(m: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Равномерно распределённый (по мере Хаара) ортонормированный базис m×d."""
    if not 1 <= d <= m:
        raise ValueError(f"Требуется 1 ≤ d ≤ m, получено d={d}, m={m}")
    gaussian = rng.standard_normal((m, d))
    q, r = scipy.linalg.qr(gaussian, mode="economic")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs[None, :]


def random_gaussian_basis(m: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Матрица m×d с независимыми элементами N(0, 1/m)."""
    if not 1 <= d <= m:
        raise ValueError(f"Требуется 1 ≤ d ≤ m, получено d={d}, m={m}")
    return rng.normal(0.0, 1.0 / np.sqrt(m), size=(m, d))


def coordinate_block_bases(m: int, n_subspaces: int, d: int) -> List[np.ndarray]:
    """Подпространства, натянутые на непересекающиеся блоки стандартного базиса."""
    if n_subspaces * d > m:
        raise ValueError(f"L·d = {n_subspaces * d} превышает m = {m}")
    identity = np.eye(m)
    return [identity[:, l * d : (l + 1) * d].copy() for l in range(n_subspaces)]


def _make_bases(spec: SyntheticSpec, seed: Seed) -> List[np.ndarray]:
    if spec.basis_model == BasisModel.COORDINATE_BLOCKS:
        return coordinate_block_bases(spec.m, spec.n_subspaces, spec.d)
    if spec.basis_model == BasisModel.GAUSSIAN_INV_M:
        return [random_gaussian_basis(spec.m, spec.d, seed.stream(PURPOSE_BASES, l)) for l in range(spec.n_subspaces)]
    return [random_orthonormal_basis(spec.m, spec.d, seed.stream(PURPOSE_BASES, l)) for l in range(spec.n_subspaces)]


def _make_coefficients(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.coefficient_model == CoefficientModel.GAUSSIAN_INV_D:
        return rng.normal(0.0, 1.0 / np.sqrt(spec.d), size=(spec.n, spec.d))
    return sample_unit_sphere_rows(spec.n, spec.d, rng)


def apply_erasures(data: DataSet, s: int, rng: np.random.Generator) -> Tuple[DataSet, np.ndarray]:
    """Обнуление s случайных координат каждой точки; подмножества независимы и равномерны."""
    if not 0 <= s < data.dim:
        raise ValueError(f"Требуется 0 ≤ s < m, получено s={s}, m={data.dim}")
    if s == 0:
        return DataSet(data.points.copy(), data.labels), np.empty((data.n_points, 0), dtype=np.int64)

    # первые s позиций случайной перестановки - равномерное подмножество размера s
    keys = rng.random((data.n_points, data.dim))
    masks = np.sort(np.argsort(keys, axis=1)[:, :s], axis=1)
    points = data.points.copy()
    points[np.arange(data.n_points)[:, None], masks] = 0.0
    return DataSet(points, data.labels), masks


def generate_dataset(spec: SyntheticSpec) -> Tuple[DataSet, SyntheticGroundTruth]:
    """Генерация L·n точек из подпространств и N0 выбросов со стираниями и нормированием."""
    seed = Seed(spec.seed)
    bases = _make_bases(spec, seed)

    blocks = []
    coefficients = np.zeros((spec.n_points, spec.d))
    for l, basis in enumerate(bases):
        a = _make_coefficients(spec, seed.stream(PURPOSE_COEFFICIENTS, l))
        coefficients[l * spec.n : (l + 1) * spec.n] = a
        blocks.append(a @ basis.T)

    outliers = sample_unit_sphere_rows(spec.n_outliers, spec.m, seed.stream(PURPOSE_OUTLIERS))
    raw_points = np.vstack(blocks + [outliers])
    labels = np.concatenate(
        [np.repeat(np.arange(spec.n_subspaces), spec.n), np.full(spec.n_outliers, OUTLIER_LABEL)]
    ).astype(np.int64)

    erased, masks = apply_erasures(DataSet(raw_points, labels), spec.s, seed.stream(PURPOSE_ERASURES))
    points = erased.points

    if spec.shuffle:
        order = seed.stream(PURPOSE_SHUFFLE).permutation(spec.n_points)
        points, labels = points[order], labels[order]
        raw_points, coefficients, masks = raw_points[order], coefficients[order], masks[order]

    norms = np.linalg.norm(points, axis=1)
    zero_rows = np.flatnonzero(norms < ZERO_NORM_TOL)
    if zero_rows.size:
        raise DegenerateErasureError(f"Точки {zero_rows.tolist()[:10]} обнулены после стирания")
    points = points / norms[:, None]

    truth = SyntheticGroundTruth(
        bases=bases,
        coefficients=coefficients,
        labels=labels,
        erasure_masks=masks,
        outlier_indices=np.flatnonzero(labels == OUTLIER_LABEL),
        raw_points=raw_points,
    )
    logger.debug(
        "Сгенерировано: N=%d, m=%d, L=%d, d=%d, s=%d, N0=%d",
        spec.n_points, spec.m, spec.n_subspaces, spec.d, spec.s, spec.n_outliers,
    )
    return DataSet(points, labels), truth
