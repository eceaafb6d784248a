"""
Модуль чтения и записи файлов данных: точки (CSV), метки, флаги выбросов,
маски стираний и манифест генератора
"""

import os
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from .datamodel import DataSet
from .errors import DatasetFormatError

POINT_FORMAT = "%.17g"


def _read_lines(path: str) -> list:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read().splitlines()
    except OSError as e:
        raise DatasetFormatError(f"Не удалось прочитать {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise DatasetFormatError(f"{path}: файл не в кодировке UTF-8 ({e})") from e


def read_dataset(path: str, labels_path: Optional[str] = None) -> DataSet:
    """Чтение набора точек из CSV (по одной точке в строке) и необязательного файла меток."""
    rows = []
    width = None
    for line_no, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            row = [float(value) for value in line.split(",")]
        except ValueError as e:
            raise DatasetFormatError(f"{path}:{line_no}: не число ({e})") from e
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DatasetFormatError(f"{path}:{line_no}: ожидалось {width} значений, получено {len(row)}")
        rows.append(row)

    if not rows:
        raise DatasetFormatError(f"{path}: файл не содержит точек")

    points = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(points)):
        raise DatasetFormatError(f"{path}: встречены бесконечные или NaN значения")

    labels = read_labels(labels_path) if labels_path else None
    if labels is not None and labels.shape[0] != points.shape[0]:
        raise DatasetFormatError(
            f"{labels_path}: {labels.shape[0]} меток для {points.shape[0]} точек"
        )

    try:
        return DataSet(points, labels)
    except ValueError as e:
        raise DatasetFormatError(f"{path}: {e}") from e


def read_labels(path: str) -> np.ndarray:
    """Чтение файла меток: по одному целому в строке, -1 означает выброс."""
    labels = []
    for line_no, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            labels.append(int(line.strip()))
        except ValueError as e:
            raise DatasetFormatError(f"{path}:{line_no}: не целое число") from e
    return np.array(labels, dtype=np.int64)


def _write_lines(path: str, lines: Iterable[str]) -> str:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    return path


def write_dataset(path: str, data: DataSet) -> str:
    """Запись точек в CSV без заголовка; значения пишутся с 17 значащими цифрами."""
    return _write_lines(
        path, (",".join(POINT_FORMAT % value for value in row) for row in data.points)
    )


def write_labels(path: str, labels: Sequence[int]) -> str:
    return _write_lines(path, (str(int(label)) for label in labels))


def write_flags(path: str, flags: Sequence[bool]) -> str:
    """Запись флагов выбросов: 1 - выброс, 0 - нет."""
    return _write_lines(path, ("1" if flag else "0" for flag in flags))


def write_masks(path: str, masks: Sequence[Sequence[int]]) -> str:
    """Запись масок стираний: индексы через запятую, пустая строка если стираний нет."""
    return _write_lines(path, (",".join(str(int(i)) for i in mask) for mask in masks))


def write_manifest(path: str, values: Dict[str, Any]) -> str:
    """Запись манифеста в формате `ключ = значение`."""
    return _write_lines(path, (f"{key} = {value}" for key, value in values.items()))
