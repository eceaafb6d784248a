"""
Модуль для управления настройками приложения
"""

import json
import os
from typing import Any, Callable, Dict, Optional

from .config import parse_bool
from .errors import ConfigError

APP_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
USER_DATA_DIR = os.path.join(APP_ROOT, "data")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"ожидается целое ≥ 1: {text}")
    return value


def _directory(text: str) -> str:
    if not text.strip():
        raise ValueError("пустой путь")
    return text.strip()


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "kmeans_restarts": _positive_int,
    "kmeans_max_iter": _positive_int,
    "workers": _positive_int,
    "cache_trials": parse_bool,
    "results_directory": _directory,
    "trials": _positive_int,
}


class Settings:
    """Класс для управления настройками приложения"""

    def __init__(self, settings_file: Optional[str] = None):
        if settings_file is None:
            self._settings_file = os.path.join(USER_DATA_DIR, "settings.json")
        else:
            self._settings_file = settings_file

        self._settings: Dict[str, Any] = {}
        self._defaults: Dict[str, Any] = {
            "kmeans_restarts": 10,
            "kmeans_max_iter": 100,
            "workers": 1,
            "cache_trials": True,
            "results_directory": "results",
            "trials": 10,
        }
        self.load()

    @property
    def settings_file(self) -> str:
        return self._settings_file

    def load(self) -> None:
        """Загрузка настроек из файла"""
        try:
            if os.path.exists(self._settings_file):
                with open(self._settings_file, "r", encoding="utf-8") as f:
                    self._settings = json.load(f)
            else:
                self._settings = {}
        except Exception as e:
            print(f"⚠️ Ошибка при загрузке настроек: {e}")
            self._settings = {}

    def save(self) -> None:
        """Сохранение настроек в файл"""
        try:
            os.makedirs(os.path.dirname(os.path.abspath(self._settings_file)), exist_ok=True)
            with open(self._settings_file, "w", encoding="utf-8") as f:
                json.dump(self._settings, f, ensure_ascii=False, indent=2)
        except Exception as e:
            print(f"⚠️ Ошибка при сохранении настроек: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """Получение значения настройки; results_directory разрешается относительно корня программы"""
        value = self._settings.get(key, default if default is not None else self._defaults.get(key))
        if key == "results_directory":
            return os.path.normpath(os.path.join(APP_ROOT, value or self._defaults[key]))
        return value

    def set(self, key: str, text: str) -> Any:
        """Разбор строкового значения, проверка и сохранение настройки"""
        if key not in _PARSERS:
            known = ", ".join(sorted(_PARSERS))
            raise ConfigError(f"Неизвестная настройка '{key}' (допустимые: {known})")
        try:
            value = _PARSERS[key](text)
        except ValueError as e:
            raise ConfigError(f"Некорректное значение для '{key}': {e}") from e

        self._settings[key] = value
        self.save()
        return value

    def reset(self) -> None:
        """Возврат к значениям по умолчанию"""
        self._settings = {}
        self.save()

    def get_all(self) -> Dict[str, Any]:
        """Все настройки с учётом значений по умолчанию"""
        return {key: self.get(key) for key in self._defaults}


settings = Settings()
