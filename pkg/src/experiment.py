"""
Модуль Monte-Carlo экспериментов: запуск испытаний по сетке параметров,
кэширование и сбор результатов
"""

import logging
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import astuple, dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg
from tqdm import tqdm

from . import __version__
from .cache import TrialCache
from .config import ExperimentConfig, ExperimentKind
from .datamodel import PURPOSE_KMEANS, Seed, derive_seed
from .errors import ConfigError, OperationCancelledError
from .metrics import evaluate_clustering, outlier_misclassification_rate
from .outlier import detect_outliers
from .synthgen import BasisModel, CoefficientModel, SyntheticSpec, generate_dataset
from .tsc_core import TscOptions, tsc_cluster

logger = logging.getLogger(__name__)

OUTLIER_PANEL = "outliers"


@dataclass(frozen=True)
class GridRow:
    """Одна строка результатов: (ячейка сетки, испытание) и метрики."""

    axis1: float
    axis2: float
    trial: int
    ce: float
    fde: float
    el: int
    l_hat: int
    sdp: bool
    max_aff: float

    @classmethod
    def from_values(cls, values) -> "GridRow":
        axis1, axis2, trial, ce, fde, el, l_hat, sdp, max_aff = values
        return cls(axis1, axis2, int(trial), ce, fde, int(el), int(l_hat), bool(sdp), max_aff)


@dataclass(frozen=True)
class OutlierRow:
    """Результат обнаружения выбросов в одном испытании."""

    m: int
    d: int
    trial: int
    n_points: int
    n_outliers: int
    threshold: float
    misclassification: float
    missed: int
    false_alarms: int

    @classmethod
    def from_values(cls, values) -> "OutlierRow":
        m, d, trial, n_points, n_outliers, threshold, misclassification, missed, false_alarms = values
        return cls(int(m), int(d), int(trial), int(n_points), int(n_outliers), threshold,
                   misclassification, int(missed), int(false_alarms))


@dataclass
class GridPanel:
    """Результаты одной панели сетки (например, одного значения s)."""

    name: str
    rows: List[GridRow] = field(default_factory=list)

    def cell_means(self, metric: str) -> List[Tuple[float, float, float]]:
        """Средние по испытаниям: (x = ρ, y = d, значение) для каждой ячейки."""
        cells: Dict[Tuple[float, float], List[float]] = {}
        for row in self.rows:
            cells.setdefault((row.axis1, row.axis2), []).append(float(getattr(row, metric)))
        return [(axis2, axis1, float(np.mean(values))) for (axis1, axis2), values in cells.items()]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    panels: List[GridPanel] = field(default_factory=list)
    outlier_rows: List[OutlierRow] = field(default_factory=list)


class TrialTask(NamedTuple):
    panel_index: int
    panel: str
    axis1_index: int
    axis2_index: int
    trial: int


def _affinity_bases(bases: List[np.ndarray], model: BasisModel) -> List[np.ndarray]:
    if model == BasisModel.GAUSSIAN_INV_M:
        return [scipy.linalg.orth(basis) for basis in bases]
    return bases


def run_grid_trial(
    config: ExperimentConfig, s: int, axis1_index: int, axis2_index: int, trial: int, options: TscOptions
) -> GridRow:
    """Одно испытание TSC для ячейки (d, ρ) и числа стираний s."""
    d = config.d[axis1_index]
    rho = config.rho[axis2_index]
    n = config.points_per_subspace(d, rho)
    n_points = config.l * n
    if n_points < 2:
        raise ConfigError(f"Ячейка d={d}, rho={rho}: слишком мало точек ({n_points})")
    q = min(config.neighbors(n, rho), n_points - 1)

    # одинаковые данные во всех панелях s: панели различаются только стираниями
    trial_seed = derive_seed(config.seed, axis1_index, axis2_index, trial)
    spec = SyntheticSpec(
        m=config.ambient_dim,
        n_subspaces=config.l,
        d=d,
        n=n,
        coefficient_model=config.coefficient_model,
        basis_model=config.basis_model,
        s=s,
        seed=trial_seed,
        shuffle=config.shuffle,
    )
    data, truth = generate_dataset(spec)

    trial_options = TscOptions(
        max_clusters=config.max_clusters,
        kmeans_restarts=options.kmeans_restarts,
        kmeans_max_iter=options.kmeans_max_iter,
    )
    result = tsc_cluster(data, q, trial_options, Seed(trial_seed).stream(PURPOSE_KMEANS))
    report = evaluate_clustering(result, truth.labels, q, _affinity_bases(truth.bases, config.basis_model))
    return GridRow(
        axis1=d,
        axis2=rho,
        trial=trial,
        ce=report.ce,
        fde=report.fde,
        el=report.el,
        l_hat=result.l_hat,
        sdp=report.detection_property_holds,
        max_aff=report.max_aff,
    )


def run_outlier_trial(config: ExperimentConfig, m_index: int, d_index: int, trial: int) -> OutlierRow:
    """Одно испытание обнаружения выбросов: L = subspace_factor·m/d, n = points_factor·d."""
    m = config.m[m_index]
    d = config.d[d_index]
    n_subspaces = config.subspace_factor * m // d
    n = config.points_factor * d
    n_outliers = int(round(config.outlier_ratio * n_subspaces * n))

    spec = SyntheticSpec(
        m=m,
        n_subspaces=n_subspaces,
        d=d,
        n=n,
        coefficient_model=CoefficientModel.SPHERE_UNIFORM,
        basis_model=BasisModel.HAAR_ORTHONORMAL,
        n_outliers=n_outliers,
        seed=derive_seed(config.seed, m_index, d_index, trial),
        shuffle=config.shuffle,
    )
    data, truth = generate_dataset(spec)
    report = detect_outliers(data)
    is_outlier = truth.labels < 0
    return OutlierRow(
        m=m,
        d=d,
        trial=trial,
        n_points=data.n_points,
        n_outliers=n_outliers,
        threshold=report.threshold,
        misclassification=outlier_misclassification_rate(report.flags, truth.labels),
        missed=int(np.sum(is_outlier & ~report.flags)),
        false_alarms=int(np.sum(~is_outlier & report.flags)),
    )


class ExperimentRunner:
    """Запуск всех испытаний эксперимента с кэшированием, прогрессом и отменой."""

    def __init__(
        self,
        config: ExperimentConfig,
        workers: int = 1,
        cache: Optional[TrialCache] = None,
        options: Optional[TscOptions] = None,
        progress: bool = True,
    ):
        self.config = config
        self.workers = max(1, int(workers))
        self.cache = cache
        self.options = options or TscOptions()
        self.progress = progress
        self.cancellation_event = threading.Event()
        self.fingerprint = config.fingerprint(
            salt=f"{__version__}|{self.options.kmeans_restarts}|{self.options.kmeans_max_iter}|"
        )

    def cancel(self):
        """Установка флага отмены: новые испытания не запускаются."""
        self.cancellation_event.set()

    def panel_names(self) -> List[str]:
        kind = self.config.experiment
        if kind == ExperimentKind.OUTLIERS:
            return [OUTLIER_PANEL]
        if kind == ExperimentKind.ERASURES:
            return [f"s{s}" for s in self.config.s]
        if kind == ExperimentKind.SINGLE_RUN:
            return ["single"]
        return ["varyd"]

    def tasks(self) -> List[TrialTask]:
        """Список испытаний в каноническом порядке (панель, ячейка, испытание)."""
        if self.config.experiment == ExperimentKind.OUTLIERS:
            axis1, axis2 = self.config.m, self.config.d
        else:
            axis1, axis2 = self.config.d, self.config.rho
        return [
            TrialTask(p, name, i1, i2, trial)
            for p, name in enumerate(self.panel_names())
            for i1 in range(len(axis1))
            for i2 in range(len(axis2))
            for trial in range(self.config.trials)
        ]

    def _compute(self, task: TrialTask):
        if self.config.experiment == ExperimentKind.OUTLIERS:
            return run_outlier_trial(self.config, task.axis1_index, task.axis2_index, task.trial)
        s = self.config.s[task.panel_index]
        return run_grid_trial(self.config, s, task.axis1_index, task.axis2_index, task.trial, self.options)

    def _row_type(self):
        return OutlierRow if self.config.experiment == ExperimentKind.OUTLIERS else GridRow

    def run_task(self, task: TrialTask):
        """Выполнение испытания (или чтение из кэша)."""
        if self.cancellation_event.is_set():
            raise OperationCancelledError("Операция отменена")

        if self.cache is not None:
            cached = self.cache.get_trial(
                self.fingerprint, task.panel, task.axis1_index, task.axis2_index, task.trial
            )
            if cached is not None:
                return self._row_type().from_values(cached)

        row = self._compute(task)
        if self.cache is not None:
            self.cache.save_trial(
                self.fingerprint, task.panel, task.axis1_index, task.axis2_index, task.trial, astuple(row)
            )
        return row

    def run(self) -> ExperimentResult:
        """Запуск всех испытаний; результат не зависит от порядка выполнения."""
        tasks = self.tasks()
        logger.debug("Эксперимент %s: %d испытаний, %d потоков", self.config.experiment.value, len(tasks), self.workers)

        bar = tqdm(total=len(tasks), desc="⏱️ Испытания", unit="trial", miniters=1, smoothing=0.1, disable=not self.progress)
        try:
            if self.workers == 1:
                rows = []
                for task in tasks:
                    rows.append(self.run_task(task))
                    bar.update(1)
            else:
                rows = self._run_parallel(tasks, bar)
        finally:
            bar.close()

        return self._collect(tasks, rows)

    def _run_parallel(self, tasks: List[TrialTask], bar) -> list:
        results: Dict[int, object] = {}
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            pending = {executor.submit(self.run_task, task): index for index, task in enumerate(tasks)}
            try:
                while pending:
                    done, _ = wait(pending, timeout=0.1, return_when=FIRST_COMPLETED)
                    if self.cancellation_event.is_set():
                        raise OperationCancelledError("Операция отменена")
                    for future in done:
                        results[pending.pop(future)] = future.result()
                        bar.update(1)
            except BaseException:
                self.cancellation_event.set()
                for future in pending:
                    future.cancel()
                raise
        return [results[index] for index in range(len(tasks))]

    def _collect(self, tasks: List[TrialTask], rows: list) -> ExperimentResult:
        result = ExperimentResult(config=self.config)
        if self.config.experiment == ExperimentKind.OUTLIERS:
            result.outlier_rows = list(rows)
            return result

        panels = {name: GridPanel(name) for name in self.panel_names()}
        for task, row in zip(tasks, rows):
            panels[task.panel].rows.append(row)
        result.panels = list(panels.values())
        return result
