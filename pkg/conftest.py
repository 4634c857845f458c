"""Shared graph fixtures for the taxigraph test suite."""

from pathlib import Path

import numpy as np
import pytest

from models import SbmSpec, WeightedDigraph

FIXTURES = Path(__file__).parent / "tests" / "fixtures"


def two_triangles_matrix(bridge: float = 0.0) -> np.ndarray:
    """Unit-weight triangles {0,1,2} and {3,4,5}, optionally joined by edge 2-3."""
    W = np.zeros((6, 6))
    for block in ((0, 1, 2), (3, 4, 5)):
        for i in block:
            for j in block:
                if i != j:
                    W[i, j] = 1.0
    W[2, 3] = W[3, 2] = bridge
    return W


def digraph(W: np.ndarray, node_ids=None) -> WeightedDigraph:
    W = np.asarray(W, dtype=float)
    ids = list(node_ids) if node_ids is not None else list(range(1, W.shape[0] + 1))
    return WeightedDigraph(ids, W, (W > 0).astype(np.int64))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def two_triangles() -> np.ndarray:
    return two_triangles_matrix()


@pytest.fixture
def bridged_triangles() -> np.ndarray:
    return two_triangles_matrix(bridge=0.01)


@pytest.fixture
def two_triangles_graph() -> WeightedDigraph:
    return digraph(two_triangles_matrix())


@pytest.fixture
def chained_cycles_graph() -> WeightedDigraph:
    """Directed 3-cycles 1->2->3 and 4->5->6 with a one-way link 3->4; not strongly connected."""
    W = np.zeros((6, 6))
    for a, b in ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)):
        W[a, b] = 1.0
    return digraph(W)


@pytest.fixture
def recovery_spec() -> SbmSpec:
    """Two blocks of 40, dense inside and sparse across, unit weights."""
    return SbmSpec(block_sizes=[40, 40], p_in=0.5, p_out=0.05, seed=0)
