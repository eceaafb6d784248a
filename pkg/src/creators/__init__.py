"""
Модули для создания файлов результатов экспериментов.
"""

from .dat import MeanGridCreator, OutlierMeanCreator
from .grid_csv import GridCsvCreator, OutlierCsvCreator

__all__ = ["GridCsvCreator", "MeanGridCreator", "OutlierCsvCreator", "OutlierMeanCreator"]
