"""Trip ingestion, weighted digraph construction and derived matrices."""

import logging
from typing import List, Sequence, TextIO, Tuple, Union
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd

from config import CSV_CHUNK_ROWS, DEFAULT_TRIP_COLUMNS
from errors import ConfigError, DomainError, InputError
from models import DegreeInfo, TripRecord, WeightedDigraph, WeightMode

logger = logging.getLogger(__name__)


def ingest_trips(
    csv_source: Union[str, Path, TextIO],
    column_names: Sequence[str] = DEFAULT_TRIP_COLUMNS,
) -> Tuple[List[TripRecord], int]:
    """
    Read taxi trips from a CSV with a header row.

    Rows whose pickup area, dropoff area or duration is missing or not a valid
    value (positive integer area, nonnegative duration) are dropped and counted.

    Args:
        csv_source: Path or text stream.
        column_names: (pickup, dropoff, duration) header names.

    Returns:
        (records, dropped_count).
    """
    if len(column_names) != 3:
        raise ConfigError(f"expected 3 column names, got {len(column_names)}")
    pickup_col, dropoff_col, duration_col = column_names

    # no usecols: pandas only checks row widths when every column is parsed
    chunks = []
    try:
        with pd.read_csv(csv_source, dtype=str, keep_default_na=True, skipinitialspace=True,
                         chunksize=CSV_CHUNK_ROWS) as reader:
            for chunk in reader:
                if not isinstance(chunk.index, pd.RangeIndex):
                    raise InputError("trip rows have more fields than the header")
                for column in column_names:
                    if column not in chunk.columns:
                        raise ConfigError(f"missing column '{column}' in trips header")
                chunks.append(chunk[list(dict.fromkeys(column_names))])
    except pd.errors.EmptyDataError:
        raise ConfigError(f"missing column '{pickup_col}': trips file has no header row")
    except pd.errors.ParserError as e:
        raise InputError(f"malformed trips row: {e}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"failed to read trips: {e}") from e
    if not chunks:
        raise ConfigError(f"missing column '{pickup_col}': trips file has no header row")
    frame = pd.concat(chunks, ignore_index=True)

    pickup = pd.to_numeric(frame[pickup_col], errors="coerce")
    dropoff = pd.to_numeric(frame[dropoff_col], errors="coerce")
    duration = pd.to_numeric(frame[duration_col], errors="coerce")

    valid = pickup.notna() & dropoff.notna() & duration.notna()
    valid &= (pickup > 0) & (dropoff > 0) & (duration >= 0)
    valid &= (pickup % 1 == 0) & (dropoff % 1 == 0)

    dropped = int((~valid).sum())
    records = [
        TripRecord(int(p), int(d), float(s))
        for p, d, s in zip(pickup[valid].to_numpy(), dropoff[valid].to_numpy(), duration[valid].to_numpy())
    ]
    if dropped:
        logger.warning("dropped %d of %d trip rows with missing or invalid fields",
                       dropped, len(frame))
    logger.info("ingested %d trips", len(records))
    return records, dropped


def build_graph(records: Sequence[TripRecord], mode: WeightMode = WeightMode.MEAN_TRAVEL_TIME) -> WeightedDigraph:
    """
    Aggregate trips into a weighted digraph over the areas they touch.

    Args:
        records: Nonempty list of trips.
        mode: mean_travel_time (W = mean duration), trip_count (W = counts) or
            inverse_mean_time (W = 1 / mean duration, 0 where the mean is 0).

    Returns:
        Graph whose node ids are the sorted distinct area ids.
    """
    if not records:
        raise DomainError("cannot build a graph from an empty trip list")
    mode = WeightMode(mode)

    node_ids = sorted({r.pickup_area for r in records} | {r.dropoff_area for r in records})
    index = {a: i for i, a in enumerate(node_ids)}
    n = len(node_ids)

    m = len(records)
    src = np.fromiter((index[r.pickup_area] for r in records), dtype=np.intp, count=m)
    dst = np.fromiter((index[r.dropoff_area] for r in records), dtype=np.intp, count=m)
    seconds = np.fromiter((r.duration_seconds for r in records), dtype=float, count=m)

    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (src, dst), 1)
    totals = np.zeros((n, n))
    np.add.at(totals, (src, dst), seconds)
    mean = np.divide(totals, counts, out=np.zeros((n, n)), where=counts > 0)

    if mode == WeightMode.MEAN_TRAVEL_TIME:
        weights = mean
    elif mode == WeightMode.TRIP_COUNT:
        weights = counts.astype(float)
    else:
        weights = np.divide(1.0, mean, out=np.zeros((n, n)), where=mean > 0)

    logger.info("built %s graph: %d nodes, %d ordered pairs with trips",
                mode.value, n, int(np.count_nonzero(counts)))
    return WeightedDigraph(node_ids, weights, counts)


def without_self_loops(W: np.ndarray) -> np.ndarray:
    """Copy of W with a zero diagonal."""
    W = np.array(W, dtype=float)
    np.fill_diagonal(W, 0.0)
    return W


def undirected_weights(Wu: np.ndarray) -> np.ndarray:
    """
    Nonnegative symmetric weights with a zero diagonal, ready for undirected clustering.

    Asymmetry up to 1e-12 relative is averaged away; more raises DomainError.
    """
    W = without_self_loops(Wu)
    if np.any(W < 0):
        raise DomainError("weights must be nonnegative")
    if np.array_equal(W, W.T):
        return W
    scale = max(float(np.abs(W).max()), 1.0)
    if np.abs(W - W.T).max() > 1e-12 * scale:
        raise DomainError("undirected clustering needs a symmetric weight matrix")
    return 0.5 * (W + W.T)


def simple_symmetrize(g: WeightedDigraph) -> WeightedDigraph:
    """W_u = W + W^T; counts become trips in either direction."""
    return g.with_weights(g.weights + g.weights.T, g.counts + g.counts.T)


def bibliometric_symmetrize(g: WeightedDigraph) -> WeightedDigraph:
    """W_u = W^T W + W W^T: common in-neighbours plus common out-neighbours."""
    W = g.weights
    Wu = W.T @ W + W @ W.T
    # a + b == b + a in floating point, so this is exactly symmetric
    Wu = 0.5 * (Wu + Wu.T)
    return g.with_weights(Wu)


def degrees(g: Union[WeightedDigraph, np.ndarray]) -> DegreeInfo:
    """Out-degrees d_i = sum_j W[i][j]."""
    W = g.weights if isinstance(g, WeightedDigraph) else np.asarray(g, dtype=float)
    return DegreeInfo(out_degree=W.sum(axis=1))


def isolated_nodes(g: Union[WeightedDigraph, np.ndarray]) -> List[int]:
    """Indices of nodes with no in- or out-weight to other nodes (self-loops ignored)."""
    W = g.weights if isinstance(g, WeightedDigraph) else np.asarray(g, dtype=float)
    W = without_self_loops(W)
    total = W.sum(axis=1) + W.sum(axis=0)
    return [int(i) for i in np.flatnonzero(total <= 0)]


def to_networkx(W: np.ndarray, directed: bool = True) -> nx.Graph:
    """Graph over node indices 0..n-1 with an edge wherever W is positive off the diagonal."""
    W = without_self_loops(W)
    G = nx.DiGraph() if directed else nx.Graph()
    G.add_nodes_from(range(W.shape[0]))
    rows, cols = np.nonzero(W > 0)
    G.add_weighted_edges_from((int(i), int(j), float(W[i, j])) for i, j in zip(rows, cols))
    return G


def components(g: Union[WeightedDigraph, np.ndarray], directed: bool) -> List[List[int]]:
    """Strongly (directed) or weakly connected components, largest first."""
    W = g.weights if isinstance(g, WeightedDigraph) else np.asarray(g, dtype=float)
    G = to_networkx(W, directed=True)
    found = nx.strongly_connected_components(G) if directed else nx.weakly_connected_components(G)
    return sorted((sorted(c) for c in found), key=lambda c: (-len(c), c[0]))


def induced_subgraph(g: WeightedDigraph, indices: Sequence[int]) -> WeightedDigraph:
    """Subgraph on the given node indices, in the given order."""
    idx = np.asarray(indices, dtype=np.intp)
    return WeightedDigraph(
        [g.node_ids[i] for i in idx],
        g.weights[np.ix_(idx, idx)],
        g.counts[np.ix_(idx, idx)],
    )


def largest_connected_component(g: WeightedDigraph, directed: bool) -> Tuple[WeightedDigraph, np.ndarray]:
    """
    Largest strongly (directed=True) or weakly connected component.

    Returns:
        (induced subgraph, original indices of its nodes); ties go to the
        component holding the smallest node index.
    """
    if g.n == 0:
        return g, np.zeros(0, dtype=np.intp)
    largest = components(g, directed)[0]
    index_map = np.asarray(largest, dtype=np.intp)
    return induced_subgraph(g, index_map), index_map


def is_strongly_connected_aperiodic(W: np.ndarray) -> bool:
    """Whether the chain on positive off-diagonal weights is irreducible and aperiodic."""
    G = to_networkx(W, directed=True)
    if G.number_of_nodes() == 0 or not nx.is_strongly_connected(G):
        return False
    if G.number_of_nodes() == 1:
        return True
    return nx.is_aperiodic(G)
