import numpy as np
import pytest

from conftest import digraph, two_triangles_matrix
from errors import ConfigError
from evaluation import adjusted_rand_index
from graph_core import bibliometric_symmetrize, simple_symmetrize
from models import SpectralConfig
from pipeline import ALGORITHMS, ClusterParams, run_clustering
from spectral import spectral_cluster
from synth import generate_sbm

TRIANGLES = [0, 0, 0, 1, 1, 1]
NEEDS_K = ["spectral-unnorm", "spectral-norm", "simple-sym", "bibliometric", "cdl", "svd", "randwalk"]


def test_registry_names_every_path():
    assert sorted(ALGORITHMS) == sorted(NEEDS_K + ["leiden", "walktrap"])


@pytest.mark.parametrize("algorithm", ["spectral-unnorm", "spectral-norm", "simple-sym", "bibliometric", "svd"])
def test_two_triangles_are_recovered(two_triangles_graph, algorithm):
    partition = run_clustering(two_triangles_graph, ClusterParams(algorithm=algorithm, k=2))
    assert partition.labels.tolist() == TRIANGLES
    assert partition.flags["isolated_nodes"] == []


def test_leiden_and_walktrap_need_no_k():
    g = digraph(two_triangles_matrix(bridge=0.01))
    assert run_clustering(g, ClusterParams(algorithm="leiden")).labels.tolist() == TRIANGLES
    assert run_clustering(g, ClusterParams(algorithm="walktrap")).labels.tolist() == TRIANGLES
    assert run_clustering(g, ClusterParams(algorithm="walktrap", k=2)).labels.tolist() == TRIANGLES


def test_isolated_and_self_loop_only_nodes_get_minus_one():
    W = np.zeros((8, 8))
    W[:6, :6] = two_triangles_matrix()
    W[7, 7] = 5.0
    partition = run_clustering(digraph(W), ClusterParams(algorithm="spectral-norm", k=2))
    assert partition.labels.tolist() == TRIANGLES + [-1, -1]
    assert partition.flags["isolated_nodes"] == [7, 8]


def test_bibliometric_unassigns_nodes_without_shared_neighbours():
    # 1 -> 2 is the only edge at nodes 1 and 2, so they share no neighbours with anyone
    W = np.zeros((8, 8))
    W[0, 1] = 1.0
    W[2:, 2:] = two_triangles_matrix()
    partition = run_clustering(digraph(W), ClusterParams(algorithm="bibliometric", k=2))
    assert partition.labels.tolist() == [-1, -1] + TRIANGLES
    assert partition.flags["unassigned_after_symmetrization"] == 2
    assert partition.flags["isolated_nodes"] == []


@pytest.mark.parametrize("algorithm, symmetrize", [
    ("simple-sym", simple_symmetrize),
    ("bibliometric", bibliometric_symmetrize),
])
def test_symmetrized_paths_cluster_the_graph_core_matrix(recovery_spec, algorithm, symmetrize):
    g, _ = generate_sbm(recovery_spec)
    expected = spectral_cluster(symmetrize(g).weights, SpectralConfig(k=2, seed=1)).canonical()
    partition = run_clustering(g, ClusterParams(algorithm=algorithm, k=2, seed=1))
    assert partition.labels.tolist() == expected.labels.tolist()


def test_cdl_on_reducible_graph_flags_teleport(chained_cycles_graph):
    partition = run_clustering(chained_cycles_graph, ClusterParams(algorithm="cdl", k=2))
    assert partition.flags["teleport_applied"] is True
    assert partition.flags["teleport"] == 0.15


def test_labels_are_canonical(two_triangles_graph):
    partition = run_clustering(two_triangles_graph, ClusterParams(algorithm="randwalk", k=2, seed=3))
    labels = partition.labels.tolist()
    assert labels[0] == 0
    assert adjusted_rand_index(labels, TRIANGLES) == 1.0


@pytest.mark.parametrize("params", [
    ClusterParams(algorithm="spectral-norm"),
    ClusterParams(algorithm="spectral-norm", k=1),
    ClusterParams(algorithm="cdl", k=7),
    ClusterParams(algorithm="walktrap", k=9),
    ClusterParams(algorithm="svd", k=2, d=9),
    ClusterParams(algorithm="kmeans", k=2),
])
def test_bad_parameters_are_config_errors(two_triangles_graph, params):
    with pytest.raises(ConfigError):
        run_clustering(two_triangles_graph, params)


@pytest.mark.slow
def test_same_seed_same_partition(recovery_spec):
    g, _ = generate_sbm(recovery_spec)
    for algorithm in NEEDS_K:
        params = ClusterParams(algorithm=algorithm, k=2, seed=4)
        assert np.array_equal(run_clustering(g, params).labels, run_clustering(g, params).labels)


def test_manifest_parameters_round_trip():
    params = ClusterParams(algorithm="svd", k=3, d=2)
    assert ClusterParams(**params.to_dict()) == params
