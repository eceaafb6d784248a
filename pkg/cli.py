"""
Скрипт для кластеризации подпространств методом TSC в консольном режиме.
"""

import sys

from src.errors import OperationCancelledError
from src.main import EXIT_INTERRUPTED, main


def run() -> int:
    """Запуск основной функции для CLI с корректной обработкой принудительного прерывания."""
    try:
        return main()
    except (KeyboardInterrupt, OperationCancelledError):
        print("\n⛔️ Прервано пользователем.")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(run())
