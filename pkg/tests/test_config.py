import pytest

from src.config import ExperimentKind, QRule, load_config, parse_config
from src.errors import ConfigError
from src.synthgen import BasisModel, CoefficientModel

VARY_D_RHO = """
# сетка по d и rho
experiment = vary_d_rho
d = 1, 2, 3
rho = 2, 4.5
m = 50
l = 15
trials = 4   # испытаний на ячейку
seed = 17
"""


def test_parse_grid_config():
    config = parse_config(VARY_D_RHO)
    assert config.experiment == ExperimentKind.VARY_D_RHO
    assert config.d == [1, 2, 3]
    assert config.rho == [2.0, 4.5]
    assert config.ambient_dim == 50
    assert config.trials == 4
    assert config.seed == 17
    assert config.q_rule == QRule.N_OVER_RHO
    assert config.basis_model == BasisModel.HAAR_ORTHONORMAL


def test_defaults_apply_and_file_overrides():
    config = parse_config("experiment = single_run\nd = 3\nrho = 5\n", defaults={"trials": 7, "seed": 2})
    assert config.trials == 7
    assert config.seed == 2
    assert parse_config(VARY_D_RHO, defaults={"trials": 7}).trials == 4


def test_neighbor_rule():
    config = parse_config(VARY_D_RHO)
    assert config.points_per_subspace(3, 4.5) == 14
    assert config.points_per_subspace(1, 0.2) == 1
    assert config.neighbors(20, 4.0) == 5
    assert config.neighbors(4, 2.0) == 3

    explicit = parse_config(VARY_D_RHO + "q_rule = explicit\nq = 9\n")
    assert explicit.neighbors(20, 4.0) == 9


@pytest.mark.parametrize(
    "text",
    [
        "d = 1\n",
        "experiment = vary_d_rho\ncolor = red\n",
        "experiment = vary_d_rho\nd = 1\nd = 2\n",
        "experiment = vary_d_rho\nd\n",
        "experiment = nonsense\n",
        "experiment = vary_d_rho\ntrials = many\n",
        "experiment = vary_d_rho\ntrials = 0\n",
        "experiment = vary_d_rho\nrho = -1\n",
        "experiment = vary_d_rho\nshuffle = maybe\n",
        "experiment = vary_d_rho\nq_rule = explicit\n",
        "experiment = vary_d_rho\nm = 50, 100\n",
        "experiment = vary_d_rho\ns = 0, 5\n",
        "experiment = vary_d_rho\nd = 60\n",
        "experiment = single_run\nd = 1, 2\nrho = 3\n",
        "experiment = erasures\ns = 50\n",
        "experiment = outliers\nm = 50\nd = 3\n",
        "experiment = vary_d_rho\nbasis_model = coordinate_blocks\nd = 5\nl = 15\n",
    ],
)
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_outlier_and_erasure_grids():
    outliers = parse_config("experiment = outliers\nm = 50, 100, 200\nd = 5\ntrials = 3\n")
    assert outliers.m == [50, 100, 200]

    erasures = parse_config("experiment = erasures\ns = 0, 10, 20\nshuffle = yes\nbasis_model = gaussian_inv_m\n")
    assert erasures.s == [0, 10, 20]
    assert erasures.shuffle is True


def test_fingerprint_tracks_content():
    first = parse_config(VARY_D_RHO)
    assert first.fingerprint() == parse_config(VARY_D_RHO).fingerprint()
    assert first.fingerprint() != parse_config(VARY_D_RHO.replace("seed = 17", "seed = 18")).fingerprint()
    assert first.fingerprint("a") != first.fingerprint("b")


def test_load_config(tmp_path):
    path = tmp_path / "experiment.conf"
    path.write_text(VARY_D_RHO, encoding="utf-8")
    assert load_config(str(path)).d == [1, 2, 3]
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.conf"))


def test_model_defaults_follow_experiment_kind():
    erasures = parse_config("experiment = erasures\ns = 0, 10\n")
    assert erasures.coefficient_model == CoefficientModel.GAUSSIAN_INV_D
    assert erasures.basis_model == BasisModel.GAUSSIAN_INV_M

    grid = parse_config("experiment = vary_d_rho\n")
    assert grid.coefficient_model == CoefficientModel.SPHERE_UNIFORM
    assert grid.basis_model == BasisModel.HAAR_ORTHONORMAL

    explicit = parse_config("experiment = erasures\ncoefficient_model = sphere_uniform\n")
    assert explicit.coefficient_model == CoefficientModel.SPHERE_UNIFORM
    assert explicit.basis_model == BasisModel.GAUSSIAN_INV_M
