import io

import numpy as np
import pytest

from conftest import digraph
from errors import GraphFormatError, InputError
from models import WeightedDigraph
from storage import (
    dumps_json,
    file_digest,
    format_graph,
    parse_graph,
    read_assignments,
    read_graph,
    read_json,
    write_assignments,
    write_graph,
    write_json,
)


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(7)
    W = rng.random((6, 6)) * (rng.random((6, 6)) < 0.5) * 1000 / 3
    g = WeightedDigraph([4, 9, 1, 77, 12, 30], W, rng.integers(0, 5, (6, 6)) * (W > 0))
    path = tmp_path / "g.graph"
    write_graph(g, path)
    assert read_graph(path) == g


def test_zero_weight_edge_with_trips_survives_round_trip():
    counts = np.array([[0, 3], [0, 0]])
    g = WeightedDigraph([1, 2], np.zeros((2, 2)), counts)
    assert "1,2,0.0,3" in format_graph(g)
    assert parse_graph(format_graph(g)) == g


def test_edges_sorted_by_node_id():
    g = digraph([[0, 1], [1, 0]], node_ids=[32, 8])
    assert format_graph(g).splitlines()[2:] == ["8,32,1.0,1", "32,8,1.0,1"]


def test_empty_edge_section():
    g = parse_graph("digraph 3\n1,2,3\n")
    assert g.n == 3
    assert not g.weights.any()


def test_stream_round_trip():
    g = digraph([[0, 2.5], [0, 0]])
    buffer = io.StringIO()
    write_graph(g, buffer)
    buffer.seek(0)
    assert read_graph(buffer) == g


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("graph 2\n1,2\n", 1),
    ("digraph two\n1,2\n", 1),
    ("digraph 2\n", 2),
    ("digraph 2\n1\n", 2),
    ("digraph 2\n1,1\n", 2),
    ("digraph 2\n1,2\n1,2,1.0\n", 3),
    ("digraph 2\n1,2\n1,3,1.0,1\n", 3),
    ("digraph 2\n1,2\n1,2,1.0,1\n2,1,1.0,1\n1,2,2.0,1\n", 5),
    ("digraph 2\n1,2\n1,2,-1.0,1\n", 3),
    ("digraph 2\n1,2\n1,2,nan,1\n", 3),
    ("digraph 2\n1,2\n1,2,abc,1\n", 3),
])
def test_malformed_graph_reports_line(text, line):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}:")


def test_missing_file_is_input_error(tmp_path):
    with pytest.raises(InputError):
        read_graph(tmp_path / "absent.graph")


def test_assignments_round_trip(tmp_path):
    path = tmp_path / "a.csv"
    write_assignments(path, [5, 8, 32], np.array([1, -1, 0]))
    assert path.read_text() == "node_id,cluster\n5,1\n8,-1\n32,0\n"
    ids, labels = read_assignments(path)
    assert ids == [5, 8, 32]
    assert labels.tolist() == [1, -1, 0]


def test_assignments_bad_header():
    with pytest.raises(GraphFormatError):
        read_assignments(io.StringIO("node,label\n1,0\n"))


def test_json_is_stable(tmp_path):
    data = {"b": np.float64(0.5), "a": np.arange(3), "c": np.int64(2)}
    text = dumps_json(data)
    assert text == '{\n  "a": [\n    0,\n    1,\n    2\n  ],\n  "b": 0.5,\n  "c": 2\n}\n'
    path = tmp_path / "r.json"
    write_json(path, data)
    assert read_json(path) == {"a": [0, 1, 2], "b": 0.5, "c": 2}


def test_file_digest_changes_with_content(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text("digraph 0\n\n")
    b.write_text("digraph 1\n1\n")
    assert file_digest(a) != file_digest(b)
    assert len(file_digest(a)) == 64
