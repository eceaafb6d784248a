"""
Модуль для работы с кэшем результатов испытаний (SQLite)
"""

import atexit
import json
import logging
import os
import sqlite3
import threading
from typing import Dict, Optional, Sequence, Tuple

from .settings import USER_DATA_DIR

logger = logging.getLogger(__name__)

TrialKey = Tuple[str, int, int, int]


class TrialCache:
    """Кэш готовых строк результатов на основе SQLite: по одному экземпляру на файл базы."""

    _instances: Dict[str, "TrialCache"] = {}
    _lock = threading.Lock()

    def __new__(cls, db_path: Optional[str] = None):
        path = os.path.abspath(db_path or cls.default_path())
        with cls._lock:
            if path not in cls._instances:
                instance = super(TrialCache, cls).__new__(cls)
                instance._initialized = False
                cls._instances[path] = instance
            return cls._instances[path]

    def __init__(self, db_path: Optional[str] = None):
        if getattr(self, "_initialized", False):
            return

        self.db_path = os.path.abspath(db_path or self.default_path())
        self._conn = None
        self._db_lock = threading.Lock()
        self._init_db()
        self._initialized = True
        atexit.register(self.close)

    @staticmethod
    def default_path() -> str:
        return os.path.join(USER_DATA_DIR, "cache", "trials.db")

    def close(self):
        """Закрытие соединения перед выходом."""
        if self._conn:
            self._conn.close()
            self._conn = None

    @property
    def conn(self) -> sqlite3.Connection:
        """Получение или создание подключения к БД (одно на все потоки)."""
        if self._conn is None:
            self._conn = sqlite3.connect(self.db_path, check_same_thread=False)
            self._conn.execute("PRAGMA journal_mode=WAL;")
        return self._conn

    def _init_db(self):
        """Инициализация таблиц базы данных."""
        os.makedirs(os.path.dirname(self.db_path), exist_ok=True)
        with self._db_lock, self.conn:
            self.conn.execute(
                """
                CREATE TABLE IF NOT EXISTS trials (
                    fingerprint TEXT,
                    panel TEXT,
                    axis1_index INTEGER,
                    axis2_index INTEGER,
                    trial INTEGER,
                    payload TEXT,
                    PRIMARY KEY (fingerprint, panel, axis1_index, axis2_index, trial)
                )
                """
            )

    def get_trial(
        self, fingerprint: str, panel: str, axis1_index: int, axis2_index: int, trial: int
    ) -> Optional[Sequence[float]]:
        """Получение закэшированной строки испытания."""
        with self._db_lock:
            cursor = self.conn.cursor()
            cursor.execute(
                """
                SELECT payload FROM trials
                WHERE fingerprint = ? AND panel = ? AND axis1_index = ? AND axis2_index = ? AND trial = ?
                """,
                (fingerprint, panel, axis1_index, axis2_index, trial),
            )
            row = cursor.fetchone()
        if row is None:
            return None
        logger.debug("Кэш: %s/%s (%d, %d) #%d", fingerprint[:8], panel, axis1_index, axis2_index, trial)
        return json.loads(row[0])

    def save_trial(
        self,
        fingerprint: str,
        panel: str,
        axis1_index: int,
        axis2_index: int,
        trial: int,
        values: Sequence[float],
    ):
        """Сохранение строки испытания в кэш."""
        # repr в JSON сохраняет float без потерь
        payload = json.dumps(list(values))
        with self._db_lock, self.conn:
            self.conn.execute(
                """
                INSERT OR REPLACE INTO trials (fingerprint, panel, axis1_index, axis2_index, trial, payload)
                VALUES (?, ?, ?, ?, ?, ?)
                """,
                (fingerprint, panel, axis1_index, axis2_index, trial, payload),
            )

    def count_trials(self, fingerprint: Optional[str] = None) -> int:
        """Число сохранённых испытаний для конфигурации (или всего)."""
        with self._db_lock:
            cursor = self.conn.cursor()
            if fingerprint is None:
                cursor.execute("SELECT COUNT(*) FROM trials")
            else:
                cursor.execute("SELECT COUNT(*) FROM trials WHERE fingerprint = ?", (fingerprint,))
            return int(cursor.fetchone()[0])

    def count_experiments(self) -> int:
        """Число различных конфигураций в кэше."""
        with self._db_lock:
            cursor = self.conn.cursor()
            cursor.execute("SELECT COUNT(DISTINCT fingerprint) FROM trials")
            return int(cursor.fetchone()[0])

    def clear_experiment(self, fingerprint: str):
        """Очистка кэша для конкретной конфигурации."""
        with self._db_lock, self.conn:
            self.conn.execute("DELETE FROM trials WHERE fingerprint = ?", (fingerprint,))

    def clear_all_cache(self):
        """Очистка всего кэша."""
        with self._db_lock:
            with self.conn:
                self.conn.execute("DELETE FROM trials")
            self.conn.execute("VACUUM")
