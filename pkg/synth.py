"""Directed weighted stochastic block model with planted ground truth."""

import logging
from typing import Tuple

import numpy as np

from errors import DomainError
from models import Partition, SbmSpec, WeightedDigraph

logger = logging.getLogger(__name__)


def generate_sbm(spec: SbmSpec) -> Tuple[WeightedDigraph, Partition]:
    """
    Sample a directed SBM.

    Each ordered pair i != j carries an edge with probability p_in (same block)
    or p_out (different blocks); weights are uniform on w_in / w_out. Node ids
    are 1..n and the ground truth labels are the block indices.
    """
    n = spec.n
    if n == 0:
        raise DomainError("stochastic block model needs at least one node")

    rng = np.random.default_rng(spec.seed)
    blocks = np.repeat(np.arange(len(spec.block_sizes)), spec.block_sizes)
    same = blocks[:, None] == blocks[None, :]

    edges = rng.random((n, n)) < np.where(same, spec.p_in, spec.p_out)
    np.fill_diagonal(edges, False)
    w_in = rng.uniform(spec.w_in[0], spec.w_in[1], size=(n, n))
    w_out = rng.uniform(spec.w_out[0], spec.w_out[1], size=(n, n))
    weights = np.where(edges, np.where(same, w_in, w_out), 0.0)

    logger.info("generated SBM: %d nodes in %d blocks, %d edges",
                n, len(spec.block_sizes), int(edges.sum()))
    graph = WeightedDigraph(list(range(1, n + 1)), weights, edges.astype(np.int64))
    return graph, Partition(blocks, len(spec.block_sizes))
