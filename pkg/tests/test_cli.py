import json

import pytest

import main as cli
from errors import ConvergenceError
from models import RunManifest
from storage import file_digest, read_json


def run(*argv) -> int:
    return cli.main([str(a) for a in argv])


def test_ingest_matches_golden(tmp_path, fixtures_dir):
    out = tmp_path / "trips.graph"
    assert run("ingest", fixtures_dir / "trips_small.csv", out) == 0
    assert out.read_text() == (fixtures_dir / "trips_small.graph").read_text()

    report = json.loads((tmp_path / "trips.graph.report.json").read_text())
    assert report == {
        "rows_read": 5,
        "rows_dropped": 1,
        "nodes": 3,
        "edges": 3,
        "isolated_nodes": [],
        "weight_mode": "mean_travel_time",
    }
    manifest = json.loads((tmp_path / "trips.graph.manifest.json").read_text())
    assert manifest["command"] == "ingest"
    assert list(manifest["input_digest"]) == ["trips_small.csv"]


def test_ingest_missing_column_exits_2(tmp_path, capsys):
    trips = tmp_path / "trips.csv"
    trips.write_text("pickup_community_area,trip_seconds\n8,300\n")
    assert run("ingest", trips, tmp_path / "g.graph") == 2
    assert "dropoff_community_area" in capsys.readouterr().err


def test_ingest_wide_rows_exit_4(tmp_path):
    trips = tmp_path / "trips.csv"
    trips.write_text("pickup_community_area,dropoff_community_area,trip_seconds\n8,32,600,99\n8,32,300,1\n")
    assert run("ingest", trips, tmp_path / "g.graph") == 4
    assert not (tmp_path / "g.graph").exists()


def test_ingest_custom_columns_and_mode(tmp_path):
    trips = tmp_path / "trips.csv"
    trips.write_text("a,b,s\n1,2,10\n1,2,30\n")
    out = tmp_path / "g.graph"
    assert run("ingest", trips, out, "--columns", "a,b,s", "--weight-mode", "trip_count") == 0
    assert out.read_text() == "digraph 2\n1,2\n1,2,2.0,2\n"


def test_cluster_two_triangles(tmp_path, fixtures_dir, two_triangles_graph):
    from storage import write_graph

    graph = tmp_path / "tri.graph"
    write_graph(two_triangles_graph, graph)
    out = tmp_path / "tri.csv"
    assert run("cluster", graph, "--algorithm", "spectral-norm", "--k", 2, "--out", out) == 0
    assert out.read_text() == (fixtures_dir / "two_triangles.csv").read_text()

    manifest = json.loads((tmp_path / "tri.csv.manifest.json").read_text())
    assert manifest["parameters"]["algorithm"] == "spectral-norm"
    assert manifest["parameters"]["k"] == 2
    assert manifest["tool"] == "taxigraph"


def test_cluster_rerun_is_byte_identical(tmp_path, recovery_spec):
    from storage import write_graph
    from synth import generate_sbm

    graph = tmp_path / "sbm.graph"
    write_graph(generate_sbm(recovery_spec)[0], graph)
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert run("cluster", graph, "--algorithm", "randwalk", "--k", 2, "--seed", 3, "--out", out) == 0
        outputs.append((out.read_bytes(), (tmp_path / f"{name}.manifest.json").read_bytes()))
    assert outputs[0] == outputs[1]

    recorded = read_json(tmp_path / "a.csv.manifest.json")
    manifest = RunManifest.from_dict(recorded)
    assert manifest.to_dict() == recorded
    assert manifest.command == "cluster"
    assert manifest.parameters["seed"] == 3
    assert manifest.input_digest == {"sbm.graph": file_digest(graph)}


def test_cdl_manifest_records_teleport(tmp_path, chained_cycles_graph):
    from storage import write_graph

    graph = tmp_path / "chain.graph"
    write_graph(chained_cycles_graph, graph)
    out = tmp_path / "chain.csv"
    assert run("cluster", graph, "--algorithm", "cdl", "--k", 2, "--out", out) == 0
    flags = json.loads((tmp_path / "chain.csv.manifest.json").read_text())["flags"]
    assert flags["teleport_applied"] is True
    assert flags["teleport"] == 0.15


def test_cluster_errors_map_to_exit_codes(tmp_path, fixtures_dir, monkeypatch):
    graph = fixtures_dir / "two_nodes.graph"
    out = tmp_path / "x.csv"
    assert run("cluster", graph, "--algorithm", "svd", "--k", 5, "--out", out) == 2
    assert run("cluster", tmp_path / "absent.graph", "--algorithm", "svd", "--k", 2, "--out", out) == 4

    bad = tmp_path / "bad.graph"
    bad.write_text("digraph 2\n1,2\n1,2,1.0\n")
    assert run("cluster", bad, "--algorithm", "svd", "--k", 2, "--out", out) == 4

    def diverge(graph, params):
        raise ConvergenceError("stationary distribution did not converge")

    monkeypatch.setattr(cli, "run_clustering", diverge)
    assert run("cluster", graph, "--algorithm", "cdl", "--k", 2, "--out", out) == 3
    assert not out.exists()


def test_unknown_algorithm_is_usage_error(fixtures_dir, tmp_path):
    with pytest.raises(SystemExit) as info:
        run("cluster", fixtures_dir / "two_nodes.graph", "--algorithm", "kmeans", "--out", tmp_path / "x.csv")
    assert info.value.code == 2


def test_compare_identical(tmp_path, fixtures_dir, capsys):
    assignments = fixtures_dir / "two_triangles.csv"
    out = tmp_path / "cmp.json"
    assert run("compare", assignments, assignments, "--out", out) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["ari"] == 1.0
    assert printed["nmi"] == pytest.approx(1.0)
    assert json.loads(out.read_text()) == printed


def test_compare_with_permutation_null(tmp_path, fixtures_dir, capsys):
    assignments = fixtures_dir / "two_triangles.csv"
    assert run("compare", assignments, assignments, "--permutations", 50) == 0
    assert "ari_null_p95" in json.loads(capsys.readouterr().out)


def test_synth_is_reproducible(tmp_path):
    args = ["synth", "--block-sizes", "5,5", "--p-in", 0.6, "--p-out", 0.1, "--w-in", "1,2", "--seed", 9]
    for name in ("a", "b"):
        assert run(*args, "--out", tmp_path / f"{name}.graph", "--truth", tmp_path / f"{name}.csv") == 0
    assert (tmp_path / "a.graph").read_bytes() == (tmp_path / "b.graph").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[1:3] == ["1,0", "2,0"]


def test_synth_rejects_bad_range(tmp_path):
    assert run("synth", "--block-sizes", "5,5", "--p-in", 0.6, "--p-out", 0.1, "--w-in", "1",
               "--out", tmp_path / "g", "--truth", tmp_path / "t") == 2


def test_export_dot_matches_golden(tmp_path, fixtures_dir):
    out = tmp_path / "two.dot"
    assert run("export", fixtures_dir / "two_nodes.graph", fixtures_dir / "two_nodes.csv",
               "--format", "dot", "--out", out) == 0
    assert out.read_text() == (fixtures_dir / "two_nodes.dot").read_text()


def test_profile(tmp_path, fixtures_dir):
    out = tmp_path / "profile.json"
    assert run("profile", fixtures_dir / "two_nodes.graph", fixtures_dir / "two_nodes.csv", "--out", out) == 0
    clusters = json.loads(out.read_text())["clusters"]
    assert [c["out_weight"] for c in clusters] == [450.0, 0.0]
    assert clusters[1]["in_out_ratio"] is None
