"""Leiden (Constant Potts Model) and Walktrap community detection on undirected weights."""

import heapq
import logging
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from config import LEIDEN_MIN_GAIN
from errors import DomainError, SingularDegreeError
from graph_core import to_networkx, undirected_weights
from models import Dendrogram, LeidenConfig, Merge, Partition, WalktrapConfig, canonical_labels

logger = logging.getLogger(__name__)


def cpm_quality(Wu: np.ndarray, labels: np.ndarray, gamma: float) -> float:
    """H = sum_c [e_c - gamma * C(n_c, 2)], e_c the intra-cluster edge weight (each pair once)."""
    W = undirected_weights(Wu)
    labels = np.asarray(labels)
    if labels.shape != (W.shape[0],):
        raise DomainError(f"expected {W.shape[0]} labels, got {labels.shape}")
    quality = 0.0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        n_c = idx.size
        quality += W[np.ix_(idx, idx)].sum() / 2.0 - gamma * n_c * (n_c - 1) / 2.0
    return float(quality)


def default_resolution(Wu: np.ndarray) -> float:
    """Graph density: total edge weight over the number of node pairs."""
    W = undirected_weights(Wu)
    n = W.shape[0]
    pairs = n * (n - 1) / 2.0
    total = W.sum() / 2.0
    if pairs == 0 or total <= 0:
        return 1.0
    return float(total / pairs)


def _move_nodes(A: np.ndarray, sizes: np.ndarray, labels: np.ndarray, gamma: float,
                rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    """Greedy local moving on an aggregate graph until a full sweep moves nothing."""
    n = A.shape[0]
    labels = labels.copy()
    cluster_size = np.bincount(labels, weights=sizes, minlength=n).astype(float)
    total_moves = 0
    while True:
        moves = 0
        for v in rng.permutation(n):
            a = labels[v]
            s = sizes[v]
            w_to = np.bincount(labels, weights=A[v], minlength=n)
            w_own = w_to[a]
            remaining = cluster_size[a] - s

            best_cluster, best_gain = a, 0.0
            for b in np.flatnonzero(w_to > 0):
                if b == a:
                    continue
                gain = (w_to[b] - w_own) - gamma * s * (cluster_size[b] - remaining)
                if gain > best_gain:
                    best_cluster, best_gain = b, gain
            if remaining > 0:
                empty = np.flatnonzero(cluster_size == 0)
                gain = -w_own + gamma * s * remaining
                if empty.size and gain > best_gain:
                    best_cluster, best_gain = empty[0], gain

            if best_cluster != a and best_gain > LEIDEN_MIN_GAIN:
                cluster_size[a] -= s
                cluster_size[best_cluster] += s
                labels[v] = best_cluster
                moves += 1
        total_moves += moves
        if moves == 0:
            return labels, total_moves


def _refine(A: np.ndarray, sizes: np.ndarray, labels: np.ndarray, gamma: float) -> np.ndarray:
    """
    Split each cluster into well-connected sub-communities.

    Nodes that are still singletons merge, in index order, into the connected
    sub-community of their own cluster with the largest nonnegative CPM gain.
    """
    n = A.shape[0]
    refined = np.arange(n)
    sub_size = sizes.astype(float).copy()
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        cluster_total = sizes[members].sum()
        in_cluster = A[np.ix_(members, members)]
        for pos, v in enumerate(members):
            if refined[v] != v or sub_size[v] != sizes[v]:
                continue
            s = sizes[v]
            # node must be well connected to the rest of its cluster
            if in_cluster[pos].sum() < gamma * s * (cluster_total - s):
                continue
            w_to = np.bincount(refined[members], weights=in_cluster[pos], minlength=n)
            best_sub, best_gain = None, 0.0
            for sub in np.flatnonzero(w_to > 0):
                if sub == refined[v]:
                    continue
                gain = w_to[sub] - gamma * s * sub_size[sub]
                if gain >= best_gain and (best_sub is None or gain > best_gain):
                    best_sub, best_gain = sub, gain
            if best_sub is not None:
                sub_size[best_sub] += s
                sub_size[v] -= s
                refined[v] = best_sub
    return refined


def _aggregate(A: np.ndarray, sizes: np.ndarray,
               refined: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collapse each refined community into one node; returns (A, sizes, node map)."""
    _, compact = np.unique(refined, return_inverse=True)
    m = compact.max() + 1
    M = np.zeros((A.shape[0], m))
    M[np.arange(A.shape[0]), compact] = 1.0
    B = M.T @ A @ M
    # weight inside a community no longer affects moves
    np.fill_diagonal(B, 0.0)
    return B, M.T @ sizes, compact


def _leiden_pass(W: np.ndarray, labels: np.ndarray, gamma: float, max_levels: int,
                 rng: np.random.Generator) -> np.ndarray:
    """One run of move / refine / aggregate levels starting from `labels`."""
    n = W.shape[0]
    A = W
    sizes = np.ones(n)
    node_of = np.arange(n)  # original node -> aggregate node
    part = canonical_labels(labels)
    for level in range(max_levels):
        part, moves = _move_nodes(A, sizes, part, gamma, rng)
        logger.debug("leiden level %d: %d moves, %d clusters on %d nodes",
                     level, moves, len(np.unique(part)), A.shape[0])
        if len(np.unique(part)) == A.shape[0]:
            break
        refined = _refine(A, sizes, part, gamma)
        if len(np.unique(refined)) == A.shape[0]:
            break
        A, sizes, compact = _aggregate(A, sizes, refined)
        # each refined community lies inside one cluster of `part`
        cluster_of = np.zeros(A.shape[0], dtype=np.int64)
        cluster_of[compact] = part
        node_of = compact[node_of]
        part = canonical_labels(cluster_of)
    return canonical_labels(part[node_of])


def leiden(Wu: np.ndarray, cfg: Optional[LeidenConfig] = None) -> Partition:
    """
    Leiden community detection maximizing CPM quality.

    Starts from singletons and repeats move / refine / aggregate passes over the
    original graph until a pass returns the partition it started from.
    """
    cfg = cfg or LeidenConfig()
    W = undirected_weights(Wu)
    n = W.shape[0]
    gamma = cfg.gamma if cfg.gamma is not None else default_resolution(W)
    rng = np.random.default_rng(cfg.seed)

    labels = np.arange(n)
    quality = cpm_quality(W, labels, gamma)
    history = [quality]
    converged = False
    for _ in range(cfg.max_levels):
        new_labels = _leiden_pass(W, labels, gamma, cfg.max_levels, rng)
        new_quality = cpm_quality(W, new_labels, gamma)
        history.append(new_quality)
        if new_quality < quality - 1e-9 * max(1.0, abs(quality)):
            logger.warning("leiden quality decreased from %.12g to %.12g", quality, new_quality)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels, quality = new_labels, new_quality

    k = int(labels.max()) + 1 if n else 0
    logger.info("leiden: %d clusters, CPM quality %.6g (gamma %.6g)", k, quality, gamma)
    return Partition(labels, max(k, 1), {"gamma": gamma, "cpm_quality": quality, "converged": converged,
                                     "quality_history": history})


def _walk_matrix(Wu: np.ndarray, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """P^t and the degrees of an undirected weight matrix."""
    W = undirected_weights(Wu)
    d = W.sum(axis=1)
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise SingularDegreeError(int(zero[0]), f"node {int(zero[0])} is isolated")
    P = W / d[:, None]
    return np.linalg.matrix_power(P, t), d


def walktrap_distance(Wu: np.ndarray, t: int, i: int, j: int) -> float:
    """r_ij = sqrt(sum_k (P^t_ik - P^t_jk)^2 / d_k)."""
    Pt, d = _walk_matrix(Wu, t)
    return float(np.sqrt(np.sum((Pt[i] - Pt[j]) ** 2 / d)))


def modularity(Wu: np.ndarray, labels: np.ndarray) -> float:
    """Newman-Girvan modularity of a labelling."""
    W = undirected_weights(Wu)
    G = to_networkx(W, directed=False)
    if G.number_of_edges() == 0:
        return 0.0
    groups: Dict[int, set] = {}
    for node, label in enumerate(np.asarray(labels).tolist()):
        groups.setdefault(label, set()).add(node)
    return float(nx.community.modularity(G, list(groups.values()), weight="weight"))


def walktrap(Wu: np.ndarray, cfg: Optional[WalktrapConfig] = None) -> Tuple[Partition, Dendrogram]:
    """
    Agglomerate adjacent clusters by the smallest Ward-like increase
    delta_sigma = |C1||C2| / (|C1| + |C2|) * r^2(C1, C2) / n.

    Cluster distances use the size-weighted mean of their members' P^t rows.
    The dendrogram is cut at cfg.k clusters, or at maximum modularity when k is None.
    """
    cfg = cfg or WalktrapConfig()
    W = undirected_weights(Wu)
    n = W.shape[0]
    Pt, d = _walk_matrix(W, cfg.t)
    scaled = Pt / np.sqrt(d)[None, :]

    size: Dict[int, int] = {i: 1 for i in range(n)}
    profile: Dict[int, np.ndarray] = {i: scaled[i] for i in range(n)}
    neighbors: Dict[int, set] = {i: set(np.flatnonzero(W[i] > 0).tolist()) for i in range(n)}

    def delta_sigma(a: int, b: int) -> float:
        diff = profile[a] - profile[b]
        return float(size[a] * size[b] / (size[a] + size[b]) * diff @ diff / n)

    heap: List[Tuple[float, int, int]] = []
    for a in range(n):
        for b in neighbors[a]:
            if a < b:
                heapq.heappush(heap, (delta_sigma(a, b), a, b))

    dendrogram = Dendrogram(n_leaves=n)
    next_id = n
    while heap:
        height, a, b = heapq.heappop(heap)
        if a not in size or b not in size:
            continue
        merged = next_id
        next_id += 1
        size[merged] = size[a] + size[b]
        profile[merged] = (size[a] * profile[a] + size[b] * profile[b]) / size[merged]
        neighbors[merged] = (neighbors[a] | neighbors[b]) - {a, b}
        for c in (a, b):
            del size[c], profile[c]
        for c in neighbors.pop(a) | neighbors.pop(b):
            if c in (a, b):
                continue
            neighbors[c] -= {a, b}
            neighbors[c].add(merged)
            heapq.heappush(heap, (delta_sigma(c, merged), min(c, merged), max(c, merged)))
        dendrogram.merges.append(Merge(left=a, right=b, height=height, merged=merged))

    flags: Dict[str, object] = {"walk_length": cfg.t}
    if cfg.k is not None:
        labels = dendrogram.cut(cfg.k)
        reached = int(labels.max()) + 1 if n else 0
        if reached != cfg.k:
            flags["clusters_reached"] = reached
            logger.warning("walktrap cannot reach %d clusters on %d components; returning %d",
                           cfg.k, n - len(dendrogram.merges), reached)
    else:
        scores = [modularity(W, dendrogram.labels_after(m)) for m in range(len(dendrogram.merges) + 1)]
        best = int(np.argmax(scores))
        labels = dendrogram.labels_after(best)
        flags["modularity"] = scores[best]
    k = int(labels.max()) + 1 if n else 1
    return Partition(labels, k, flags), dendrogram
