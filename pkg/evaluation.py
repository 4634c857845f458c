"""Partition agreement metrics and per-cluster flow profiles."""

import logging
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from errors import DomainError
from models import UNASSIGNED, AgreementReport, Partition, WeightedDigraph

logger = logging.getLogger(__name__)

Labels = Union[Partition, Sequence[int], np.ndarray]


def _labels(p: Labels) -> np.ndarray:
    return np.asarray(p.labels if isinstance(p, Partition) else p, dtype=np.int64)


def _comparable(a: Labels, b: Labels) -> Tuple[np.ndarray, np.ndarray, int]:
    """Drop nodes labelled -1 in either partition; returns (a, b, excluded count)."""
    la, lb = _labels(a), _labels(b)
    if la.shape != lb.shape:
        raise DomainError(f"partitions cover {la.size} and {lb.size} nodes")
    keep = (la != UNASSIGNED) & (lb != UNASSIGNED)
    return la[keep], lb[keep], int((~keep).sum())


def adjusted_rand_index(a: Labels, b: Labels) -> float:
    """Adjusted Rand index; 1.0 for identical partitions up to relabeling."""
    la, lb, _ = _comparable(a, b)
    if la.size == 0:
        return 1.0
    return float(adjusted_rand_score(la, lb))


def normalized_mutual_information(a: Labels, b: Labels) -> float:
    """MI / arithmetic mean of the two entropies; 1.0 when both entropies are zero."""
    la, lb, _ = _comparable(a, b)
    if la.size == 0:
        return 1.0
    return float(normalized_mutual_info_score(la, lb, average_method="arithmetic"))


def agreement(a: Labels, b: Labels) -> AgreementReport:
    """ARI, NMI and the contingency table of two partitions."""
    la, lb, excluded = _comparable(a, b)
    if excluded:
        logger.info("excluded %d unassigned node(s) from the comparison", excluded)
    table = contingency_matrix(la, lb) if la.size else np.zeros((0, 0), dtype=np.int64)
    return AgreementReport(
        ari=adjusted_rand_index(la, lb),
        nmi=normalized_mutual_information(la, lb),
        contingency=np.asarray(table),
        excluded=excluded,
    )


def agreement_matrix(partitions: Mapping[str, Labels]) -> Tuple[List[str], np.ndarray]:
    """Pairwise ARI between named partitions; symmetric with unit diagonal."""
    names = list(partitions)
    table = np.eye(len(names))
    for i, left in enumerate(names):
        for j in range(i + 1, len(names)):
            table[i, j] = table[j, i] = adjusted_rand_index(partitions[left], partitions[names[j]])
    return names, table


def permutation_null_ari(a: Labels, b: Labels, n_permutations: int = 1000,
                         seed: int = 0) -> Tuple[float, float]:
    """
    Observed ARI against the 95th percentile of ARIs with b's labels shuffled.

    Returns:
        (observed ARI, 95th percentile of the permutation null).
    """
    la, lb, _ = _comparable(a, b)
    if n_permutations < 1:
        raise DomainError(f"n_permutations must be >= 1, got {n_permutations}")
    rng = np.random.default_rng(seed)
    null = np.array([adjusted_rand_score(la, rng.permutation(lb)) for _ in range(n_permutations)])
    return adjusted_rand_index(la, lb), float(np.percentile(null, 95))


def cluster_flow_profile(g: WeightedDigraph, partition: Labels) -> List[Dict[str, float]]:
    """
    Per-cluster flow summary of a directed graph.

    Rows hold size, internal weight, weight entering from and leaving to other
    clusters, their ratio, and internal edge density (self-loops excluded).
    """
    labels = _labels(partition)
    if labels.size != g.n:
        raise DomainError(f"partition covers {labels.size} nodes, graph has {g.n}")
    W = g.weights.copy()
    np.fill_diagonal(W, 0.0)
    rows = []
    for c in sorted(set(labels.tolist()) - {UNASSIGNED}):
        inside = labels == c
        outside = ~inside
        size = int(inside.sum())
        internal = float(W[np.ix_(inside, inside)].sum())
        in_weight = float(W[np.ix_(outside, inside)].sum())
        out_weight = float(W[np.ix_(inside, outside)].sum())
        possible = size * (size - 1)
        edges = int(np.count_nonzero(W[np.ix_(inside, inside)]))
        rows.append({
            "cluster": int(c),
            "size": size,
            "internal_weight": internal,
            "in_weight": in_weight,
            "out_weight": out_weight,
            "in_out_ratio": in_weight / out_weight if out_weight > 0 else None,
            "density": edges / possible if possible else 0.0,
        })
    return rows
