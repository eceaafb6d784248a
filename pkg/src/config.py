"""
Модуль конфигурации экспериментов: разбор файлов формата `ключ = значение`
"""

import hashlib
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from .errors import ConfigError
from .synthgen import BasisModel, CoefficientModel


class ExperimentKind(str, Enum):
    VARY_D_RHO = "vary_d_rho"
    ERASURES = "erasures"
    OUTLIERS = "outliers"
    SINGLE_RUN = "single_run"


class QRule(str, Enum):
    EXPLICIT = "explicit"
    N_OVER_RHO = "n_over_rho"


MIN_Q = 3

ERASURE_COEFFICIENTS = CoefficientModel.GAUSSIAN_INV_D
ERASURE_BASES = BasisModel.GAUSSIAN_INV_M


@dataclass
class ExperimentConfig:
    """Параметры Monte-Carlo эксперимента."""

    experiment: ExperimentKind
    d: List[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    rho: List[float] = field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0, 10.0])
    s: List[int] = field(default_factory=lambda: [0])
    m: List[int] = field(default_factory=lambda: [50])
    l: int = 15
    trials: int = 10
    coefficient_model: Optional[CoefficientModel] = None
    basis_model: Optional[BasisModel] = None
    q_rule: QRule = QRule.N_OVER_RHO
    q: Optional[int] = None
    max_clusters: Optional[int] = None
    shuffle: bool = False
    seed: int = 0
    points_factor: int = 5
    subspace_factor: int = 2
    outlier_ratio: float = 1.0

    def __post_init__(self):
        # без явного указания модели выбираются по виду эксперимента
        erasures = self.experiment == ExperimentKind.ERASURES
        if self.coefficient_model is None:
            self.coefficient_model = ERASURE_COEFFICIENTS if erasures else CoefficientModel.SPHERE_UNIFORM
        if self.basis_model is None:
            self.basis_model = ERASURE_BASES if erasures else BasisModel.HAAR_ORTHONORMAL
        self.validate()

    @property
    def ambient_dim(self) -> int:
        return self.m[0]

    def validate(self) -> None:
        """Проверка согласованности параметров."""
        for name in ("d", "rho", "s", "m"):
            if not getattr(self, name):
                raise ConfigError(f"Сетка '{name}' пуста")
        if self.trials < 1:
            raise ConfigError("trials должно быть ≥ 1")
        if self.l < 1:
            raise ConfigError("l должно быть ≥ 1")
        if any(d < 1 for d in self.d) or any(m < 1 for m in self.m):
            raise ConfigError("d и m должны быть положительными")
        if any(rho <= 0 for rho in self.rho):
            raise ConfigError("rho должно быть положительным")
        if self.q_rule == QRule.EXPLICIT and (self.q is None or self.q < 1):
            raise ConfigError("Для q_rule = explicit требуется q ≥ 1")
        if self.max_clusters is not None and self.max_clusters < 1:
            raise ConfigError("max_clusters должно быть ≥ 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed должен быть 64-битным беззнаковым целым")

        if self.experiment == ExperimentKind.OUTLIERS:
            for m in self.m:
                for d in self.d:
                    if d > m or (self.subspace_factor * m) % d:
                        raise ConfigError(f"Для m={m}, d={d} число подпространств subspace_factor·m/d не целое")
            if self.outlier_ratio < 0:
                raise ConfigError("outlier_ratio не может быть отрицательным")
            return

        if len(self.m) != 1:
            raise ConfigError("Список m допускается только для эксперимента outliers")
        if any(d > self.ambient_dim for d in self.d):
            raise ConfigError(f"d не может превышать m={self.ambient_dim}")
        if any(not 0 <= s < self.ambient_dim for s in self.s):
            raise ConfigError(f"s должно быть в [0, {self.ambient_dim})")
        if self.basis_model == BasisModel.COORDINATE_BLOCKS and max(self.d) * self.l > self.ambient_dim:
            raise ConfigError("Координатные блоки требуют L·d ≤ m")
        if self.experiment == ExperimentKind.SINGLE_RUN and (len(self.d) != 1 or len(self.rho) != 1):
            raise ConfigError("single_run требует ровно одно значение d и rho")
        if self.experiment != ExperimentKind.ERASURES and self.s != [0]:
            raise ConfigError("Сетка s допускается только для эксперимента erasures")

    def points_per_subspace(self, d: int, rho: float) -> int:
        """n = d·ρ (округление до целого, не меньше 1)."""
        return max(1, int(round(d * rho)))

    def neighbors(self, n: int, rho: float) -> int:
        """q по правилу: явное значение или max(3, round(n/ρ))."""
        if self.q_rule == QRule.EXPLICIT:
            return int(self.q)
        return max(MIN_Q, int(round(n / rho)))

    def canonical_text(self) -> str:
        """Каноническое представление для отпечатка конфигурации."""
        parts = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                value = ",".join(repr(v) for v in value)
            elif isinstance(value, Enum):
                value = value.value
            parts.append(f"{f.name}={value}")
        return "\n".join(parts)

    def fingerprint(self, salt: str = "") -> str:
        return hashlib.sha256((salt + self.canonical_text()).encode("utf-8")).hexdigest()


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"true", "yes", "1", "on"}:
        return True
    if lowered in {"false", "no", "0", "off"}:
        return False
    raise ValueError(f"не логическое значение: {text}")


def _parse_list(item: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    def parse(text: str) -> List[Any]:
        return [item(part.strip()) for part in text.split(",") if part.strip()]

    return parse


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "experiment": ExperimentKind,
    "d": _parse_list(int),
    "rho": _parse_list(float),
    "s": _parse_list(int),
    "m": _parse_list(int),
    "l": int,
    "trials": int,
    "coefficient_model": CoefficientModel,
    "basis_model": BasisModel,
    "q_rule": QRule,
    "q": int,
    "max_clusters": int,
    "shuffle": parse_bool,
    "seed": int,
    "points_factor": int,
    "subspace_factor": int,
    "outlier_ratio": float,
}


def parse_config(text: str, defaults: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Разбор текста конфигурации; `#` начинает комментарий, списки через запятую."""
    values: Dict[str, Any] = dict(defaults or {})
    seen = set()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Строка {line_no}: ожидается 'ключ = значение'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in _PARSERS:
            raise ConfigError(f"Строка {line_no}: неизвестный ключ '{key}'")
        if key in seen:
            raise ConfigError(f"Строка {line_no}: ключ '{key}' указан повторно")
        seen.add(key)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as e:
            raise ConfigError(f"Строка {line_no}: некорректное значение для '{key}': {e}") from e

    if "experiment" not in values:
        raise ConfigError("Не указан ключ 'experiment'")
    return ExperimentConfig(**values)


def load_config(path: str, defaults: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Чтение конфигурации эксперимента из файла."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"Не удалось прочитать конфигурацию {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ConfigError(f"Конфигурация {path} не в кодировке UTF-8 ({e})") from e
    return parse_config(text, defaults)
