"""
Основной модуль командной строки: кластеризация, обнаружение выбросов,
эксперименты и генерация данных
"""

import argparse
import logging
import os
import signal
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from .cache import TrialCache
from .config import ExperimentKind, load_config
from .creators import GridCsvCreator, MeanGridCreator, OutlierCsvCreator, OutlierMeanCreator
from .dataio import read_dataset, write_dataset, write_flags, write_labels, write_manifest, write_masks
from .datamodel import PURPOSE_KMEANS, Seed
from .errors import ConfigError, OperationCancelledError, TscError
from .experiment import ExperimentRunner
from .outlier import cluster_with_outliers, detect_outliers
from .settings import settings
from .synthgen import BasisModel, CoefficientModel, SyntheticSpec, generate_dataset
from .tsc_core import TscOptions, tsc_cluster

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INTERRUPTED = 130

SHOWN_EIGENVALUES = 10


def _tsc_options(**overrides) -> TscOptions:
    """Параметры конвейера с учётом сохранённых настроек."""
    return TscOptions(
        kmeans_restarts=int(settings.get("kmeans_restarts")),
        kmeans_max_iter=int(settings.get("kmeans_max_iter")),
        **overrides,
    )


def cmd_cluster(args: argparse.Namespace) -> int:
    """Кластеризация набора точек из CSV и запись меток."""
    data = read_dataset(args.dataset)
    options = _tsc_options(n_clusters=args.l, max_clusters=args.max_clusters, seed=args.seed)
    rng = Seed(args.seed).stream(PURPOSE_KMEANS)

    if args.detect_outliers:
        result = cluster_with_outliers(data, args.q, options, rng)
        print(f"🔎 Выбросов: {int(result.outliers.sum())}")
    else:
        result = tsc_cluster(data, args.q, options, rng)

    write_labels(args.out, result.labels)
    smallest = " ".join(f"{value:.6g}" for value in result.spectrum.smallest(SHOWN_EIGENVALUES))
    print(f"📊 L̂ = {result.l_hat}")
    print(f"📈 Наименьшие собственные значения: {smallest}")
    print(f"✅ Метки сохранены: {args.out}")
    return EXIT_OK


def cmd_outliers(args: argparse.Namespace) -> int:
    """Обнаружение выбросов и запись флагов (1 - выброс)."""
    data = read_dataset(args.dataset)
    report = detect_outliers(data)
    write_flags(args.out, report.flags)
    print(f"📏 Порог: {report.threshold:.6g}")
    print(f"🔎 Выбросов: {report.n_flagged} из {data.n_points}")
    print(f"✅ Флаги сохранены: {args.out}")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    """Запуск Monte-Carlo эксперимента по файлу конфигурации."""
    config = load_config(args.config, defaults={"trials": int(settings.get("trials"))})
    out_dir = args.out or os.path.join(settings.get("results_directory"), config.experiment.value)

    use_cache = settings.get("cache_trials", True) and not args.no_cache
    cache = TrialCache() if use_cache else None
    workers = args.workers if args.workers is not None else int(settings.get("workers"))

    runner = ExperimentRunner(config, workers=workers, cache=cache, options=_tsc_options(), progress=not args.quiet)
    if cache is not None:
        if args.clear_cache:
            cache.clear_experiment(runner.fingerprint)
            print("🗑️ Кэш этой конфигурации очищен")
        cached = cache.count_trials(runner.fingerprint)
        if cached:
            print(f"💾 В кэше: {cached} из {len(runner.tasks())} испытаний")

    def signal_handler(sig, frame):
        runner.cancel()
        raise OperationCancelledError("Операция отменена пользователем")

    previous_handler = signal.signal(signal.SIGINT, signal_handler)
    try:
        print(f"🔄 Эксперимент {config.experiment.value}: {len(runner.tasks())} испытаний...")
        result = runner.run()
    finally:
        signal.signal(signal.SIGINT, previous_handler)

    files: List[Tuple[str, str]] = []
    if config.experiment == ExperimentKind.OUTLIERS:
        for creator in (OutlierCsvCreator(out_dir), OutlierMeanCreator(out_dir)):
            files.append((creator.format_name, creator.create(result.outlier_rows)))
        rates = [row.misclassification for row in result.outlier_rows]
        print(f"📊 Средняя ошибка классификации выбросов: {np.mean(rates):.6g}")
    else:
        for panel in result.panels:
            csv_creator = GridCsvCreator(out_dir)
            files.append((csv_creator.format_name, csv_creator.create(panel)))
            mean_creator = MeanGridCreator(out_dir)
            files.extend((mean_creator.format_name, filename) for filename in mean_creator.create(panel))
            mean_ce = np.mean([row.ce for row in panel.rows])
            print(f"📊 {panel.name}: средняя CE = {mean_ce:.6g}")

    print("─" * 60)
    for format_name, filename in files:
        print(f"✅ {format_name} создан: {filename}")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    """Генерация синтетического набора и запись данных, меток, масок и манифеста."""
    synthetic = SyntheticSpec(
        m=args.m,
        n_subspaces=args.l,
        d=args.d,
        n=args.n,
        coefficient_model=args.coefficients,
        basis_model=args.basis,
        s=args.s,
        n_outliers=args.n0,
        seed=args.seed,
        shuffle=args.shuffle,
    )
    data, truth = generate_dataset(synthetic)

    prefix = args.out
    write_dataset(f"{prefix}.csv", data)
    write_labels(f"{prefix}.labels", truth.labels)
    write_masks(f"{prefix}.masks", truth.erasure_masks)
    write_manifest(
        f"{prefix}.manifest",
        {
            "m": synthetic.m,
            "L": synthetic.n_subspaces,
            "d": synthetic.d,
            "n": synthetic.n,
            "s": synthetic.s,
            "N0": synthetic.n_outliers,
            "coefficient_model": synthetic.coefficient_model.value,
            "basis_model": synthetic.basis_model.value,
            "shuffle": str(synthetic.shuffle).lower(),
            "seed": synthetic.seed,
        },
    )
    print(f"✅ Сгенерировано {data.n_points} точек в R^{data.dim}: {prefix}.csv")
    return EXIT_OK


def cmd_settings(args: argparse.Namespace) -> int:
    """Просмотр и изменение настроек приложения."""
    if args.reset:
        settings.reset()
        print("🔄 Настройки сброшены")
    elif args.key is not None:
        if args.value is None:
            raise ConfigError(f"Не указано значение для '{args.key}'")
        value = settings.set(args.key, args.value)
        print(f"✅ {args.key} = {value}")
        return EXIT_OK

    print(f"⚙️ Настройки ({settings.settings_file}):")
    for key, value in settings.get_all().items():
        print(f"  {key} = {value}")
    return EXIT_OK


def cmd_cache(args: argparse.Namespace) -> int:
    """Сведения о кэше испытаний и его очистка."""
    cache = TrialCache()
    if args.clear:
        cache.clear_all_cache()
        print("🗑️ Кэш испытаний очищен")
    print(f"💾 {cache.db_path}: {cache.count_trials()} испытаний, {cache.count_experiments()} конфигураций")
    return EXIT_OK


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"ожидается неотрицательное целое: {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"ожидается положительное целое: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsc",
        description="Кластеризация подпространств пороговым отбором корреляций (TSC)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="отладочный вывод")
    parser.add_argument("--quiet", action="store_true", help="без индикатора прогресса")
    subparsers = parser.add_subparsers(dest="command", required=True)

    cluster = subparsers.add_parser("cluster", help="кластеризация набора точек")
    cluster.add_argument("dataset", help="CSV с точками")
    cluster.add_argument("--q", type=int, required=True, help="число соседей q")
    cluster.add_argument("--l", type=_positive, default=None, help="зафиксировать число кластеров")
    cluster.add_argument("--max-clusters", type=_positive, default=None, help="граница поиска разрыва (по умолчанию ⌊N/2⌋)")
    cluster.add_argument("--seed", type=_non_negative, default=0)
    cluster.add_argument("--detect-outliers", action="store_true", help="удалить выбросы перед кластеризацией")
    cluster.add_argument("--out", required=True, help="файл меток")
    cluster.set_defaults(handler=cmd_cluster)

    outliers = subparsers.add_parser("outliers", help="обнаружение выбросов")
    outliers.add_argument("dataset", help="CSV с точками")
    outliers.add_argument("--out", required=True, help="файл флагов")
    outliers.set_defaults(handler=cmd_outliers)

    experiment = subparsers.add_parser("experiment", help="Monte-Carlo эксперимент")
    experiment.add_argument("--config", required=True, help="файл конфигурации")
    experiment.add_argument("--out", default=None, help="каталог результатов")
    experiment.add_argument("--workers", type=_positive, default=None, help="число потоков")
    experiment.add_argument("--no-cache", action="store_true", help="не использовать кэш испытаний")
    experiment.add_argument("--clear-cache", action="store_true", help="пересчитать испытания этой конфигурации")
    experiment.set_defaults(handler=cmd_experiment)

    generate = subparsers.add_parser("generate", help="генерация синтетических данных")
    generate.add_argument("--m", type=int, required=True, help="объемлющая размерность")
    generate.add_argument("--l", type=int, required=True, help="число подпространств")
    generate.add_argument("--d", type=int, required=True, help="размерность подпространств")
    generate.add_argument("--n", type=int, required=True, help="точек в подпространстве")
    generate.add_argument("--s", type=_non_negative, default=0, help="стираний на точку")
    generate.add_argument("--n0", type=_non_negative, default=0, help="число выбросов")
    generate.add_argument(
        "--coefficients",
        choices=[model.value for model in CoefficientModel],
        default=CoefficientModel.SPHERE_UNIFORM.value,
    )
    generate.add_argument(
        "--basis", choices=[model.value for model in BasisModel], default=BasisModel.HAAR_ORTHONORMAL.value
    )
    generate.add_argument("--seed", type=_non_negative, default=0)
    generate.add_argument("--shuffle", action="store_true")
    generate.add_argument("--out", required=True, help="префикс выходных файлов")
    generate.set_defaults(handler=cmd_generate)

    settings_parser = subparsers.add_parser("settings", help="просмотр и изменение настроек")
    settings_parser.add_argument("key", nargs="?", default=None, help="имя настройки")
    settings_parser.add_argument("value", nargs="?", default=None, help="новое значение")
    settings_parser.add_argument("--reset", action="store_true", help="вернуть значения по умолчанию")
    settings_parser.set_defaults(handler=cmd_settings)

    cache = subparsers.add_parser("cache", help="кэш испытаний")
    cache.add_argument("--clear", action="store_true", help="очистить весь кэш")
    cache.set_defaults(handler=cmd_cache)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Основная функция программы."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except (KeyboardInterrupt, OperationCancelledError):
        print("\n⛔️ Прервано пользователем.")
        return EXIT_INTERRUPTED
    except TscError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
