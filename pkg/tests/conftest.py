import numpy as np
import pytest

from src.spectral import AdjacencyGraph
from src.synthgen import BasisModel, CoefficientModel, SyntheticSpec, generate_dataset


def clique_graph(*sizes: int) -> AdjacencyGraph:
    """Непересекающиеся клики с единичными весами."""
    n_points = sum(sizes)
    matrix = np.zeros((n_points, n_points))
    start = 0
    for size in sizes:
        matrix[start : start + size, start : start + size] = 1.0
        start += size
    np.fill_diagonal(matrix, 0.0)
    return AdjacencyGraph(matrix)


@pytest.fixture
def two_cliques() -> AdjacencyGraph:
    return clique_graph(3, 3)


@pytest.fixture
def block_spec() -> SyntheticSpec:
    """Два ортогональных координатных подпространства в R^50, d=5, n=50."""
    return SyntheticSpec(
        m=50,
        n_subspaces=2,
        d=5,
        n=50,
        coefficient_model=CoefficientModel.SPHERE_UNIFORM,
        basis_model=BasisModel.COORDINATE_BLOCKS,
        seed=11,
    )


@pytest.fixture
def block_data(block_spec):
    return generate_dataset(block_spec)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
