"""
Модуль для создания файлов средних значений в формате `x y value` для построения графиков
"""

import os
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..experiment import GridPanel, OutlierRow
from .grid_csv import format_number

GRID_METRICS = ("ce", "fde", "el")


def _write_triples(filename: str, triples: Sequence[Tuple[float, float, float]]) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)
    with open(filename, "w", encoding="utf-8", newline="\n") as f:
        for x, y, value in triples:
            f.write(f"{format_number(x)} {format_number(y)} {format_number(value)}\n")
    return filename


class MeanGridCreator:
    """Класс для создания файлов средних по ячейкам: x = ρ, y = d"""

    def __init__(self, output_dir: str, metrics: Sequence[str] = GRID_METRICS):
        self.output_dir = output_dir
        self.metrics = tuple(metrics)

    @property
    def format_name(self) -> str:
        """Возвращает имя формата."""
        return "DAT"

    def create(self, panel: GridPanel) -> List[str]:
        """Создание файлов <метрика>_<панель>.dat."""
        return [
            _write_triples(
                os.path.join(self.output_dir, f"{metric}_{panel.name}.dat"),
                [(x, y, float(value)) for x, y, value in panel.cell_means(metric)],
            )
            for metric in self.metrics
        ]


class OutlierMeanCreator:
    """Класс для создания файла средней ошибки обнаружения выбросов: x = m, y = d"""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    @property
    def format_name(self) -> str:
        return "DAT"

    def create(self, rows: Sequence[OutlierRow]) -> str:
        cells: Dict[Tuple[int, int], List[float]] = {}
        for row in rows:
            cells.setdefault((row.m, row.d), []).append(row.misclassification)
        triples = [(m, d, float(np.mean(values))) for (m, d), values in cells.items()]
        return _write_triples(os.path.join(self.output_dir, "outlier_err.dat"), triples)
