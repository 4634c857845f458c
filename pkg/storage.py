"""File storage layer: graph files, assignment CSVs and JSON reports."""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import List, TextIO, Tuple, Union

import numpy as np

from config import ASSIGNMENTS_HEADER, GRAPH_HEADER_KEYWORD
from errors import GraphFormatError, InputError
from models import WeightedDigraph

logger = logging.getLogger(__name__)

PathOrStream = Union[str, Path, TextIO]


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """
    Write text to path using atomic write.

    Args:
        path: Target file; its directory must exist.
        text: Full file contents.
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")

    # Atomic write: write to temp file in the same directory, then rename
    fd, temp_path = tempfile.mkstemp(dir=directory, prefix=f".{path.name}_", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(temp_path, path)
    except OSError as e:
        try:
            os.unlink(temp_path)
        except OSError:
            pass
        raise InputError(f"failed to write {path}: {e}") from e


def _read_text(source: PathOrStream) -> str:
    if hasattr(source, 'read'):
        return source.read()
    try:
        with open(source, 'r', encoding='utf-8', newline='') as f:
            return f.read()
    except OSError as e:
        raise InputError(f"failed to read {source}: {e}") from e


def _emit(sink: PathOrStream, text: str) -> None:
    if hasattr(sink, 'write'):
        sink.write(text)
    else:
        atomic_write_text(sink, text)


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as f:
            for chunk in iter(lambda: f.read(1 << 16), b''):
                digest.update(chunk)
    except OSError as e:
        raise InputError(f"failed to read {path}: {e}") from e
    return digest.hexdigest()


def format_graph(g: WeightedDigraph) -> str:
    """
    Render a graph in the taxigraph graph format.

    Line 1 is `digraph <n>`, line 2 the comma-separated node ids, then one
    `src_id,dst_id,weight,count` line per edge sorted by (src_id, dst_id).
    Weights use the shortest decimal that round-trips.
    """
    lines = [f"{GRAPH_HEADER_KEYWORD} {g.n}", ",".join(str(a) for a in g.node_ids)]
    order = sorted(range(g.n), key=lambda i: g.node_ids[i])
    present = (g.counts > 0) | (g.weights != 0)
    for i in order:
        for j in order:
            if present[i, j]:
                lines.append(
                    f"{g.node_ids[i]},{g.node_ids[j]},{float(g.weights[i, j])!r},{int(g.counts[i, j])}"
                )
    return "\n".join(lines) + "\n"


def write_graph(g: WeightedDigraph, sink: PathOrStream) -> None:
    """Write a graph to a path (atomically) or to an open text stream."""
    _emit(sink, format_graph(g))
    logger.info("wrote graph with %d nodes and %d edges", g.n, g.edge_count())


def parse_graph(text: str) -> WeightedDigraph:
    """Parse the graph format; errors carry the 1-based line number."""
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError(1, "empty graph file")

    header = lines[0].split()
    if len(header) != 2 or header[0] != GRAPH_HEADER_KEYWORD:
        raise GraphFormatError(1, f"expected '{GRAPH_HEADER_KEYWORD} <n>', got {lines[0]!r}")
    try:
        n = int(header[1])
    except ValueError:
        raise GraphFormatError(1, f"node count is not an integer: {header[1]!r}")
    if n < 0:
        raise GraphFormatError(1, f"node count must be nonnegative, got {n}")

    if len(lines) < 2:
        raise GraphFormatError(2, "missing node id line")
    node_line = lines[1].strip()
    try:
        node_ids = [int(a) for a in node_line.split(",")] if node_line else []
    except ValueError:
        raise GraphFormatError(2, f"node ids must be integers: {node_line!r}")
    if len(node_ids) != n:
        raise GraphFormatError(2, f"declared {n} nodes, listed {len(node_ids)}")
    if len(set(node_ids)) != n:
        raise GraphFormatError(2, "duplicate node id")
    index = {a: i for i, a in enumerate(node_ids)}

    weights = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=np.int64)
    seen = set()
    for line_number, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise GraphFormatError(line_number, f"expected 4 fields, got {len(fields)}")
        try:
            src, dst = int(fields[0]), int(fields[1])
            weight = float(fields[2])
            count = int(fields[3])
        except ValueError:
            raise GraphFormatError(line_number, f"unparseable edge {line!r}")
        if src not in index or dst not in index:
            raise GraphFormatError(line_number, f"edge {src}->{dst} uses an undeclared node")
        if (src, dst) in seen:
            raise GraphFormatError(line_number, f"duplicate edge {src}->{dst}")
        if not np.isfinite(weight) or weight < 0 or count < 0:
            raise GraphFormatError(line_number, f"edge {src}->{dst} needs finite nonnegative values")
        seen.add((src, dst))
        weights[index[src], index[dst]] = weight
        counts[index[src], index[dst]] = count

    return WeightedDigraph(node_ids, weights, counts)


def read_graph(source: PathOrStream) -> WeightedDigraph:
    """Read a graph from a path or an open text stream."""
    g = parse_graph(_read_text(source))
    logger.info("read graph with %d nodes and %d edges", g.n, g.edge_count())
    return g


def write_assignments(sink: PathOrStream, node_ids: List[int], labels: np.ndarray) -> None:
    """Write `node_id,cluster` rows in node order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(ASSIGNMENTS_HEADER)
    for node_id, label in zip(node_ids, np.asarray(labels).tolist()):
        writer.writerow([int(node_id), int(label)])
    _emit(sink, buffer.getvalue())


def read_assignments(source: PathOrStream) -> Tuple[List[int], np.ndarray]:
    """Read an assignments CSV back into (node_ids, labels)."""
    rows = list(csv.reader(io.StringIO(_read_text(source))))
    if not rows or tuple(h.strip() for h in rows[0]) != ASSIGNMENTS_HEADER:
        raise GraphFormatError(1, f"expected header {','.join(ASSIGNMENTS_HEADER)}")
    node_ids: List[int] = []
    labels: List[int] = []
    for line_number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise GraphFormatError(line_number, f"expected 2 fields, got {len(row)}")
        try:
            node_ids.append(int(row[0]))
            labels.append(int(row[1]))
        except ValueError:
            raise GraphFormatError(line_number, f"unparseable assignment {row!r}")
    if len(set(node_ids)) != len(node_ids):
        raise GraphFormatError(1, "duplicate node id in assignments")
    return node_ids, np.asarray(labels, dtype=np.int64)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps_json(data: dict) -> str:
    """Stable JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_json(path: Union[str, Path], data: dict) -> None:
    """Write a JSON report atomically."""
    atomic_write_text(path, dumps_json(data))


def read_json(path: Union[str, Path]) -> dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"failed to read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise GraphFormatError(e.lineno, f"invalid JSON: {e.msg}") from e
