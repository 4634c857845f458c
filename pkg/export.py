"""DOT and GraphML renderings of a clustered graph."""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

import networkx as nx
import numpy as np

from config import CLUSTER_PALETTE, MAX_PENWIDTH, MIN_PENWIDTH, TOOL_NAME, UNASSIGNED_COLOR
from errors import DomainError, InputError
from models import UNASSIGNED, WeightedDigraph
from storage import atomic_write_text

logger = logging.getLogger(__name__)


def cluster_color(label: int) -> str:
    if label == UNASSIGNED:
        return UNASSIGNED_COLOR
    return CLUSTER_PALETTE[label % len(CLUSTER_PALETTE)]


def _edges_with_widths(g: WeightedDigraph) -> List[Tuple[int, int, float, float]]:
    """(i, j, weight, penwidth) for every positive edge, sorted by node id.

    Pen width grows linearly with the weight's quantile among all edges.
    """
    order = sorted(range(g.n), key=lambda i: g.node_ids[i])
    edges = [(i, j, float(g.weights[i, j])) for i in order for j in order if g.weights[i, j] > 0]
    if not edges:
        return []
    weights = np.array([w for _, _, w in edges])
    quantile = np.searchsorted(np.sort(weights), weights, side="right") / len(weights)
    widths = MIN_PENWIDTH + (MAX_PENWIDTH - MIN_PENWIDTH) * quantile
    return [(i, j, w, float(pw)) for (i, j, w), pw in zip(edges, widths)]


def _label_map(g: WeightedDigraph, node_ids: List[int], labels: np.ndarray) -> Dict[int, int]:
    assigned = dict(zip(node_ids, np.asarray(labels).tolist()))
    missing = [a for a in g.node_ids if a not in assigned]
    if missing:
        raise DomainError(f"assignments miss node(s) {missing[:5]}")
    return assigned


def to_dot(g: WeightedDigraph, node_ids: List[int], labels: np.ndarray) -> str:
    """DOT text with nodes filled by cluster color and edge pen width by weight quantile."""
    assigned = _label_map(g, node_ids, labels)
    lines = [f"digraph {TOOL_NAME} {{", "  node [style=filled];"]
    for a in sorted(g.node_ids):
        label = int(assigned[a])
        lines.append(f'  "{a}" [label="{a}", cluster={label}, fillcolor="{cluster_color(label)}"];')
    for i, j, weight, width in _edges_with_widths(g):
        lines.append(
            f'  "{g.node_ids[i]}" -> "{g.node_ids[j]}" [weight={weight!r}, penwidth={width:.2f}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_networkx_graph(g: WeightedDigraph, node_ids: List[int], labels: np.ndarray) -> nx.DiGraph:
    """DiGraph keyed by area id with cluster/color node attributes and weight/count/penwidth edges."""
    assigned = _label_map(g, node_ids, labels)
    G = nx.DiGraph()
    for a in sorted(g.node_ids):
        label = int(assigned[a])
        G.add_node(a, cluster=label, color=cluster_color(label))
    for i, j, weight, width in _edges_with_widths(g):
        G.add_edge(g.node_ids[i], g.node_ids[j], weight=weight,
                   count=int(g.counts[i, j]), penwidth=round(width, 2))
    return G


def write_export(path: Union[str, Path], g: WeightedDigraph, node_ids: List[int],
                 labels: np.ndarray, fmt: str) -> None:
    """Write a dot or graphml rendering."""
    if fmt == "dot":
        atomic_write_text(path, to_dot(g, node_ids, labels))
    elif fmt == "graphml":
        try:
            nx.write_graphml(to_networkx_graph(g, node_ids, labels), str(path))
        except OSError as e:
            raise InputError(f"failed to write {path}: {e}") from e
    else:
        raise DomainError(f"unknown export format '{fmt}'")
    logger.info("exported %s to %s", fmt, path)
