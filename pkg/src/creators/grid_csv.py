"""
Модуль для создания CSV-файлов с построчными результатами испытаний
"""

import os
from typing import Iterable, List

from ..experiment import GridPanel, OutlierRow

NUMBER_FORMAT = "%.6g"

GRID_HEADER = "axis1,axis2,trial,ce,fde,el,l_hat,sdp,max_aff"
OUTLIER_HEADER = "m,d,trial,n_points,n_outliers,threshold,misclassification,missed,false_alarms"


def format_number(value) -> str:
    """Форматирование числа: 6 значащих цифр, точка как разделитель."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return NUMBER_FORMAT % value


def _write(filename: str, header: str, lines: Iterable[str]) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)
    with open(filename, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for line in lines:
            f.write(line + "\n")
    return filename


class GridCsvCreator:
    """Класс для создания CSV-файлов сетки результатов"""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    @property
    def format_name(self) -> str:
        """Возвращает имя формата."""
        return "CSV"

    def create(self, panel: GridPanel) -> str:
        """Создание файла grid_<панель>.csv со всеми строками панели."""
        filename = os.path.join(self.output_dir, f"grid_{panel.name}.csv")
        lines = (
            ",".join(
                format_number(value)
                for value in (
                    row.axis1, row.axis2, row.trial, row.ce, row.fde, row.el, row.l_hat, row.sdp, row.max_aff
                )
            )
            for row in panel.rows
        )
        return _write(filename, GRID_HEADER, lines)


class OutlierCsvCreator:
    """Класс для создания CSV-файла результатов обнаружения выбросов"""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    @property
    def format_name(self) -> str:
        return "CSV"

    def create(self, rows: List[OutlierRow]) -> str:
        filename = os.path.join(self.output_dir, "outliers.csv")
        lines = (
            ",".join(
                format_number(value)
                for value in (
                    row.m, row.d, row.trial, row.n_points, row.n_outliers, row.threshold,
                    row.misclassification, row.missed, row.false_alarms,
                )
            )
            for row in rows
        )
        return _write(filename, OUTLIER_HEADER, lines)
