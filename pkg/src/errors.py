"""
Исключения библиотеки кластеризации подпространств
"""


class TscError(Exception):
    """Базовое исключение для всех ошибок предметной области."""


class ZeroPointError(TscError):
    """Точка с нулевой (или почти нулевой) нормой не может быть нормирована."""

    def __init__(self, indices):
        self.indices = list(indices)
        shown = ", ".join(str(i) for i in self.indices[:10])
        if len(self.indices) > 10:
            shown += ", ..."
        super().__init__(f"Нулевые точки (норма < 1e-12): {shown}")


class ConvergenceFailureError(TscError):
    """Разложение по собственным значениям не достигло требуемой точности."""


class InvalidQError(TscError):
    """Недопустимое число соседей q."""

    def __init__(self, q: int, n_points: int):
        self.q = q
        self.n_points = n_points
        super().__init__(f"q={q} вне допустимого диапазона [1, {n_points - 1}] для N={n_points}")


class EmptyAfterRemovalError(TscError):
    """После удаления выбросов не осталось точек."""


class DegenerateErasureError(TscError):
    """После стирания координат точка стала нулевой."""


class LengthMismatchError(TscError):
    """Длины векторов меток не совпадают."""


class NotOrthonormalError(TscError):
    """Базис подпространства не ортонормирован."""


class DatasetFormatError(TscError):
    """Ошибка разбора файла с данными или метками."""


class ConfigError(TscError):
    """Некорректная конфигурация эксперимента или генератора."""


class OperationCancelledError(TscError):
    """Исключение, выбрасываемое при отмене операции."""


class InvalidClusterCountError(TscError, ValueError):
    """Недопустимое число кластеров или граница поиска разрыва."""


class TooFewPointsError(TscError, ValueError):
    """Для операции недостаточно точек."""
