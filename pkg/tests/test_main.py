import os

import numpy as np
import pytest

import src.main as main_module
from src.cache import TrialCache
from src.dataio import read_labels
from src.main import EXIT_ERROR, EXIT_OK, build_parser, main
from src.metrics import clustering_error
from src.settings import Settings

EXPERIMENT = "experiment = vary_d_rho\nd = 2, 3\nrho = 4\nm = 20\nl = 3\ntrials = 2\nseed = 9\n"


@pytest.fixture
def generated(tmp_path):
    prefix = str(tmp_path / "blocks")
    code = main(
        [
            "--quiet", "generate", "--m", "50", "--l", "2", "--d", "5", "--n", "50",
            "--basis", "coordinate_blocks", "--seed", "4", "--out", prefix,
        ]
    )
    assert code == EXIT_OK
    return prefix


def test_generate_writes_all_files(generated):
    for suffix in (".csv", ".labels", ".masks", ".manifest"):
        assert os.path.exists(generated + suffix)
    with open(generated + ".manifest", encoding="utf-8") as f:
        manifest = f.read()
    assert "basis_model = coordinate_blocks" in manifest
    assert "seed = 4" in manifest
    with open(generated + ".masks", encoding="utf-8") as f:
        assert f.read() == "\n" * 100


def test_cluster_command(generated, tmp_path, capsys):
    out = str(tmp_path / "predicted.labels")
    assert main(["cluster", generated + ".csv", "--q", "10", "--out", out]) == EXIT_OK
    assert clustering_error(read_labels(out), read_labels(generated + ".labels")) == 0.0
    printed = capsys.readouterr().out
    assert "L̂ = 2" in printed
    assert "✅" in printed


def test_cluster_with_outlier_detection(generated, tmp_path):
    out = str(tmp_path / "predicted.labels")
    assert main(["cluster", generated + ".csv", "--q", "10", "--l", "2", "--detect-outliers", "--out", out]) == EXIT_OK
    assert len(read_labels(out)) == 100


def test_outliers_command(tmp_path, capsys):
    prefix = str(tmp_path / "mixed")
    main(["generate", "--m", "100", "--l", "2", "--d", "3", "--n", "30", "--n0", "5", "--seed", "1", "--out", prefix])
    flags_path = str(tmp_path / "flags.txt")
    assert main(["outliers", prefix + ".csv", "--out", flags_path]) == EXIT_OK
    flags = np.loadtxt(flags_path, dtype=int)
    np.testing.assert_array_equal(flags, [0] * 60 + [1] * 5)
    assert "Порог" in capsys.readouterr().out


def test_domain_errors_exit_with_message(tmp_path, capsys):
    assert main(["cluster", str(tmp_path / "missing.csv"), "--q", "3", "--out", str(tmp_path / "x")]) == EXIT_ERROR
    assert "❌ DatasetFormatError" in capsys.readouterr().out

    points = tmp_path / "points.csv"
    points.write_text("1,0\n0,1\n1,1\n", encoding="utf-8")
    assert main(["cluster", str(points), "--q", "5", "--out", str(tmp_path / "x")]) == EXIT_ERROR
    assert "❌ InvalidQError" in capsys.readouterr().out


def test_experiment_outputs_are_deterministic(tmp_path):
    config = tmp_path / "grid.conf"
    config.write_text(EXPERIMENT, encoding="utf-8")

    outputs = []
    for run in ("first", "second"):
        out_dir = tmp_path / run
        code = main(["--quiet", "experiment", "--config", str(config), "--out", str(out_dir), "--no-cache"])
        assert code == EXIT_OK
        outputs.append({name: (out_dir / name).read_bytes() for name in sorted(os.listdir(out_dir))})

    assert sorted(outputs[0]) == ["ce_varyd.dat", "el_varyd.dat", "fde_varyd.dat", "grid_varyd.csv"]
    assert outputs[0] == outputs[1]


def test_outlier_experiment_outputs(tmp_path, capsys):
    config = tmp_path / "outliers.conf"
    config.write_text("experiment = outliers\nm = 20\nd = 2\ntrials = 1\n", encoding="utf-8")
    out_dir = tmp_path / "out"
    assert main(["--quiet", "experiment", "--config", str(config), "--out", str(out_dir), "--no-cache"]) == EXIT_OK
    assert sorted(os.listdir(out_dir)) == ["outlier_err.dat", "outliers.csv"]
    printed = capsys.readouterr().out
    assert f"✅ CSV создан: {out_dir / 'outliers.csv'}" in printed
    assert f"✅ DAT создан: {out_dir / 'outlier_err.dat'}" in printed


def test_bad_config_exits_with_error(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("experiment = vary_d_rho\ncolour = red\n", encoding="utf-8")
    assert main(["experiment", "--config", str(config), "--no-cache"]) == EXIT_ERROR
    assert "❌ ConfigError" in capsys.readouterr().out


def test_parser_rejects_negative_seed():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["generate", "--m", "5", "--l", "1", "--d", "1", "--n", "3", "--seed", "-1", "--out", "x"])


def test_generate_counts(tmp_path):
    prefix = str(tmp_path / "small")
    args = ["generate", "--m", "10", "--l", "2", "--d", "2", "--n", "5", "--s", "2", "--n0", "3", "--out", prefix]
    assert main(args) == EXIT_OK
    with open(prefix + ".csv", encoding="utf-8") as f:
        assert len(f.read().splitlines()) == 13
    np.testing.assert_array_equal(read_labels(prefix + ".labels")[-3:], -1)
    with open(prefix + ".masks", encoding="utf-8") as f:
        assert all(len(line.split(",")) == 2 for line in f.read().splitlines())


def test_cluster_is_reproducible(generated, tmp_path):
    outputs = []
    for name in ("a.labels", "b.labels"):
        out = tmp_path / name
        main(["cluster", generated + ".csv", "--q", "10", "--seed", "3", "--out", str(out)])
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_orthogonal_points_are_all_flagged(tmp_path):
    points = tmp_path / "orthogonal.csv"
    points.write_text("\n".join(",".join("1" if i == j else "0" for i in range(20)) for j in range(4)) + "\n", encoding="utf-8")
    flags_path = tmp_path / "flags.txt"
    assert main(["outliers", str(points), "--out", str(flags_path)]) == EXIT_OK
    assert flags_path.read_text(encoding="utf-8") == "1\n1\n1\n1\n"


def test_mean_files_match_raw_rows(tmp_path):
    config = tmp_path / "grid.conf"
    config.write_text(EXPERIMENT, encoding="utf-8")
    out_dir = tmp_path / "out"
    main(["--quiet", "experiment", "--config", str(config), "--out", str(out_dir), "--no-cache"])

    raw = np.loadtxt(out_dir / "grid_varyd.csv", delimiter=",", skiprows=1)
    means = np.atleast_2d(np.loadtxt(out_dir / "ce_varyd.dat"))
    assert raw.shape[0] == 4
    for x, y, value in means:
        cell = (raw[:, 0] == y) & (raw[:, 1] == x)
        assert value == pytest.approx(raw[cell, 3].mean(), abs=1e-5)


@pytest.mark.parametrize("flags", [["--l", "0"], ["--max-clusters", "-1"], ["--max-clusters", "0"]])
def test_parser_rejects_non_positive_cluster_counts(flags):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["cluster", "points.csv", "--q", "2", "--out", "x", *flags])


def test_invalid_arguments_exit_with_message(tmp_path, capsys):
    points = tmp_path / "points.csv"
    points.write_text("1,0\n0,1\n1,1\n", encoding="utf-8")
    out = str(tmp_path / "x")

    assert main(["cluster", str(points), "--q", "0", "--out", out]) == EXIT_ERROR
    assert "❌ InvalidQError" in capsys.readouterr().out

    assert main(["cluster", str(points), "--q", "1", "--l", "4", "--out", out]) == EXIT_ERROR
    assert "❌ InvalidClusterCountError" in capsys.readouterr().out

    single = tmp_path / "single.csv"
    single.write_text("1,0,0\n", encoding="utf-8")
    assert main(["outliers", str(single), "--out", out]) == EXIT_ERROR
    assert "❌ TooFewPointsError" in capsys.readouterr().out


@pytest.mark.parametrize("command", ["cluster", "outliers"])
def test_non_utf8_dataset_exits_with_message(tmp_path, capsys, command):
    points = tmp_path / "binary.csv"
    points.write_bytes(b"\xff\xfe,3\n")
    args = [command, str(points), "--out", str(tmp_path / "x")]
    if command == "cluster":
        args += ["--q", "1"]
    assert main(args) == EXIT_ERROR
    assert "❌ DatasetFormatError" in capsys.readouterr().out


@pytest.fixture
def isolated_state(tmp_path, monkeypatch):
    store = Settings(str(tmp_path / "settings.json"))
    monkeypatch.setattr(main_module, "settings", store)
    monkeypatch.setattr(TrialCache, "default_path", staticmethod(lambda: str(tmp_path / "cache" / "trials.db")))
    return store


def test_settings_command(isolated_state, capsys):
    assert main(["settings", "workers", "3"]) == EXIT_OK
    assert "✅ workers = 3" in capsys.readouterr().out
    assert isolated_state.get("workers") == 3

    assert main(["settings"]) == EXIT_OK
    assert "workers = 3" in capsys.readouterr().out

    assert main(["settings", "--reset"]) == EXIT_OK
    assert isolated_state.get("workers") == 1


@pytest.mark.parametrize("args", [["settings", "workers"], ["settings", "workers", "0"], ["settings", "colour", "red"]])
def test_settings_command_errors(isolated_state, capsys, args):
    assert main(args) == EXIT_ERROR
    assert "❌ ConfigError" in capsys.readouterr().out


def test_experiment_cache_and_clearing(isolated_state, tmp_path, capsys):
    config = tmp_path / "grid.conf"
    config.write_text(EXPERIMENT, encoding="utf-8")
    run = ["--quiet", "experiment", "--config", str(config), "--out", str(tmp_path / "out")]

    assert main(run) == EXIT_OK
    assert "💾" not in capsys.readouterr().out
    assert main(run) == EXIT_OK
    assert "💾 В кэше: 4 из 4 испытаний" in capsys.readouterr().out

    assert main(run + ["--clear-cache"]) == EXIT_OK
    printed = capsys.readouterr().out
    assert "🗑️" in printed
    assert "💾" not in printed

    assert main(["cache"]) == EXIT_OK
    assert "4 испытаний, 1 конфигураций" in capsys.readouterr().out
    assert main(["cache", "--clear"]) == EXIT_OK
    assert "0 испытаний, 0 конфигураций" in capsys.readouterr().out
