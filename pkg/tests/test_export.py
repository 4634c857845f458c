import networkx as nx
import numpy as np
import pytest

from conftest import digraph
from errors import DomainError
from export import cluster_color, to_dot, to_networkx_graph, write_export
from storage import read_graph


def test_two_node_dot_matches_golden(fixtures_dir):
    g = read_graph(fixtures_dir / "two_nodes.graph")
    assert to_dot(g, [1, 2], np.array([0, 1])) == (fixtures_dir / "two_nodes.dot").read_text()


def test_penwidth_follows_weight_quantile():
    g = digraph([[0, 1, 4], [2, 0, 0], [0, 3, 0.0]])
    dot = to_dot(g, [1, 2, 3], np.array([0, 0, 1]))
    assert '"1" -> "2" [weight=1.0, penwidth=1.62];' in dot
    assert '"1" -> "3" [weight=4.0, penwidth=5.00];' in dot
    assert '"3" -> "2" [weight=3.0, penwidth=3.88];' in dot


def test_unassigned_nodes_are_grey():
    assert cluster_color(-1) == "#cccccc"
    assert cluster_color(12) == cluster_color(0)
    dot = to_dot(digraph(np.zeros((2, 2))), [1, 2], np.array([0, -1]))
    assert '"2" [label="2", cluster=-1, fillcolor="#cccccc"];' in dot


def test_missing_assignment_is_domain_error():
    with pytest.raises(DomainError):
        to_dot(digraph(np.zeros((2, 2))), [1], np.array([0]))


def test_graphml_export(tmp_path):
    g = digraph([[0, 2.5], [0, 0.0]], node_ids=[8, 32])
    G = to_networkx_graph(g, [32, 8], np.array([1, 0]))
    assert G.nodes[8]["cluster"] == 0
    assert G.edges[8, 32]["weight"] == 2.5

    path = tmp_path / "out.graphml"
    write_export(path, g, [8, 32], np.array([0, 1]), "graphml")
    loaded = nx.read_graphml(path)
    assert loaded.number_of_edges() == 1
    assert loaded.nodes["32"]["cluster"] == 1


def test_unknown_format(tmp_path):
    with pytest.raises(DomainError):
        write_export(tmp_path / "x", digraph(np.zeros((1, 1))), [1], np.array([0]), "svg")
