#!/usr/bin/env python3
"""taxigraph - cluster taxi-trip flows between areas as a weighted directed graph."""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from config import (
    DEFAULT_LOG_LEVEL,
    DEFAULT_SEED,
    DEFAULT_TELEPORT,
    DEFAULT_TRIP_COLUMNS,
    EXIT_OK,
    KMEANS_RESTARTS,
    LOG_FORMAT,
    LOG_LEVEL_ENV,
    MANIFEST_SUFFIX,
    REPORT_SUFFIX,
    TOOL_NAME,
    TOOL_VERSION,
    WALKTRAP_DEFAULT_T,
)
from errors import ConfigError, DomainError, TaxiGraphError
from evaluation import agreement, cluster_flow_profile, permutation_null_ari
from export import write_export
from graph_core import build_graph, ingest_trips, isolated_nodes
from models import RunManifest, SbmSpec, WeightMode
from pipeline import ALGORITHMS, ClusterParams, run_clustering
from storage import (
    dumps_json,
    file_digest,
    read_assignments,
    read_graph,
    write_assignments,
    write_graph,
    write_json,
)
from synth import generate_sbm

logger = logging.getLogger(TOOL_NAME)


def setup_logging() -> None:
    """Log to stderr at the level named by TAXIGRAPH_LOG_LEVEL."""
    level_name = os.environ.get(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL).upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _manifest_path(output: Path) -> Path:
    return output.with_name(output.name + MANIFEST_SUFFIX)


def _emit_manifest(output: Path, command: str, parameters: dict,
                   inputs: Sequence[Path] = (), flags: Optional[dict] = None) -> None:
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        input_digest={p.name: file_digest(p) for p in inputs},
        flags=flags or {},
    )
    write_json(_manifest_path(output), manifest.to_dict())


def _split_pair(text: str, flag: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects lo,hi, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{flag} expects numbers, got {text!r}")


def cmd_ingest(args: argparse.Namespace) -> int:
    """Trips CSV -> graph file + ingest report."""
    columns = tuple(c.strip() for c in args.columns.split(",")) if args.columns else DEFAULT_TRIP_COLUMNS
    if len(columns) != 3:
        raise ConfigError(f"--columns expects pickup,dropoff,duration, got {args.columns!r}")
    mode = WeightMode(args.weight_mode)

    records, dropped = ingest_trips(args.trips_csv, columns)
    graph = build_graph(records, mode)
    out = Path(args.out_graph)
    write_graph(graph, out)

    report = {
        "rows_read": len(records) + dropped,
        "rows_dropped": dropped,
        "nodes": graph.n,
        "edges": graph.edge_count(),
        "isolated_nodes": [graph.node_ids[i] for i in isolated_nodes(graph)],
        "weight_mode": mode.value,
    }
    report_path = Path(args.report) if args.report else out.with_name(out.name + REPORT_SUFFIX)
    write_json(report_path, report)
    _emit_manifest(out, "ingest",
                   {"weight_mode": mode.value, "columns": list(columns)},
                   inputs=[Path(args.trips_csv)])
    logger.info("ingested %d trips into %d nodes", len(records), graph.n)
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    """Graph file -> assignments CSV + manifest."""
    params = ClusterParams(
        algorithm=args.algorithm,
        k=args.k,
        d=args.d,
        gamma=args.gamma,
        walk_length=args.walk_length,
        teleport=args.teleport,
        seed=args.seed,
        restarts=args.restarts,
    )
    graph_path = Path(args.graph_file)
    graph = read_graph(graph_path)
    partition = run_clustering(graph, params)

    out = Path(args.out)
    write_assignments(out, graph.node_ids, partition.labels)
    _emit_manifest(out, "cluster", params.to_dict(), inputs=[graph_path], flags=partition.flags)
    logger.info("%s produced %d clusters", args.algorithm, len(partition.cluster_sizes()))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    """Two assignment files -> agreement report JSON on stdout (and --out)."""
    ids_a, labels_a = read_assignments(args.assignments_a)
    ids_b, labels_b = read_assignments(args.assignments_b)
    if ids_a != ids_b:
        common = sorted(set(ids_a) & set(ids_b))
        if len(common) != len(ids_a) or len(common) != len(ids_b):
            raise DomainError("assignment files cover different node sets")
        pos_a = {a: i for i, a in enumerate(ids_a)}
        pos_b = {a: i for i, a in enumerate(ids_b)}
        labels_a = labels_a[[pos_a[a] for a in common]]
        labels_b = labels_b[[pos_b[a] for a in common]]

    result = agreement(labels_a, labels_b).to_dict()
    if args.permutations:
        _, p95 = permutation_null_ari(labels_a, labels_b, args.permutations, args.seed)
        result["ari_null_p95"] = p95
    text = dumps_json(result)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        write_json(out, result)
        _emit_manifest(out, "compare", {"permutations": args.permutations, "seed": args.seed},
                       inputs=[Path(args.assignments_a), Path(args.assignments_b)])
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    """SBM flags -> graph file + truth CSV."""
    try:
        block_sizes = [int(b) for b in args.block_sizes.split(",")]
    except ValueError:
        raise ConfigError(f"--block-sizes expects integers, got {args.block_sizes!r}")
    spec = SbmSpec(
        block_sizes=block_sizes,
        p_in=args.p_in,
        p_out=args.p_out,
        w_in=_split_pair(args.w_in, "--w-in"),
        w_out=_split_pair(args.w_out, "--w-out"),
        seed=args.seed,
    )
    graph, truth = generate_sbm(spec)
    out = Path(args.out)
    write_graph(graph, out)
    write_assignments(Path(args.truth), graph.node_ids, truth.labels)
    _emit_manifest(out, "synth", spec.to_dict())
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    """Graph + assignments -> DOT or GraphML."""
    graph_path, assignments_path = Path(args.graph_file), Path(args.assignments)
    graph = read_graph(graph_path)
    node_ids, labels = read_assignments(assignments_path)
    out = Path(args.out)
    write_export(out, graph, node_ids, labels, args.format)
    _emit_manifest(out, "export", {"format": args.format}, inputs=[graph_path, assignments_path])
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    """Graph + assignments -> per-cluster flow profile JSON."""
    graph_path, assignments_path = Path(args.graph_file), Path(args.assignments)
    graph = read_graph(graph_path)
    node_ids, labels = read_assignments(assignments_path)
    position = {a: i for i, a in enumerate(node_ids)}
    missing = [a for a in graph.node_ids if a not in position]
    if missing:
        raise DomainError(f"assignments miss node(s) {missing[:5]}")
    ordered = labels[[position[a] for a in graph.node_ids]]
    out = Path(args.out)
    write_json(out, {"clusters": cluster_flow_profile(graph, ordered)})
    _emit_manifest(out, "profile", {}, inputs=[graph_path, assignments_path])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description=__doc__)
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert a trips CSV into a graph file")
    p.add_argument("trips_csv")
    p.add_argument("out_graph")
    p.add_argument("--weight-mode", choices=[m.value for m in WeightMode],
                   default=WeightMode.MEAN_TRAVEL_TIME.value)
    p.add_argument("--columns", help="pickup,dropoff,duration header names")
    p.add_argument("--report", help="ingest report path (default <out_graph>.report.json)")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("cluster", help="cluster a graph file")
    p.add_argument("graph_file")
    p.add_argument("--algorithm", required=True, choices=list(ALGORITHMS))
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int, help="svd latent dimension (default: automatic)")
    p.add_argument("--gamma", type=float, help="leiden resolution (default: graph density)")
    p.add_argument("--walk-length", type=int, default=WALKTRAP_DEFAULT_T)
    p.add_argument("--teleport", type=float, default=DEFAULT_TELEPORT)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--restarts", type=int, default=KMEANS_RESTARTS)
    p.add_argument("--out", required=True, help="assignments CSV path")
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("compare", help="agreement between two assignment files")
    p.add_argument("assignments_a")
    p.add_argument("assignments_b")
    p.add_argument("--out")
    p.add_argument("--permutations", type=int, default=0,
                   help="add the 95th percentile ARI of this many label permutations")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("synth", help="generate a directed stochastic block model")
    p.add_argument("--block-sizes", required=True, help="comma-separated, e.g. 40,40")
    p.add_argument("--p-in", type=float, required=True)
    p.add_argument("--p-out", type=float, required=True)
    p.add_argument("--w-in", default="1,1", help="lo,hi")
    p.add_argument("--w-out", default="1,1", help="lo,hi")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True, help="graph file path")
    p.add_argument("--truth", required=True, help="ground-truth assignments CSV path")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("export", help="render a clustered graph")
    p.add_argument("graph_file")
    p.add_argument("assignments")
    p.add_argument("--format", choices=["dot", "graphml"], default="dot")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("profile", help="per-cluster inflow/outflow summary")
    p.add_argument("graph_file")
    p.add_argument("assignments")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_profile)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except TaxiGraphError as e:
        print(f"{TOOL_NAME} {args.command}: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("Interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
