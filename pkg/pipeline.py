"""Algorithm registry: runs one clustering path on a weighted digraph."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from config import DEFAULT_SEED, DEFAULT_TELEPORT, KMEANS_RESTARTS, WALKTRAP_DEFAULT_T
from errors import ConfigError
from graph_core import (
    bibliometric_symmetrize,
    induced_subgraph,
    isolated_nodes,
    simple_symmetrize,
    without_self_loops,
)
from models import (
    UNASSIGNED,
    CdlConfig,
    LaplacianVariant,
    LeidenConfig,
    Partition,
    RandWalkConfig,
    SpectralConfig,
    SvdConfig,
    WalktrapConfig,
    WeightedDigraph,
)
from communities import leiden, walktrap
from spectral import cdl_cluster, randwalk_cluster, spectral_cluster, svd_cluster

logger = logging.getLogger(__name__)


@dataclass
class ClusterParams:
    """Flag values for one clustering run."""

    algorithm: str
    k: Optional[int] = None
    d: Optional[int] = None
    gamma: Optional[float] = None
    walk_length: int = WALKTRAP_DEFAULT_T
    teleport: float = DEFAULT_TELEPORT
    seed: int = DEFAULT_SEED
    restarts: int = KMEANS_RESTARTS

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "d": self.d,
            "gamma": self.gamma,
            "walk_length": self.walk_length,
            "teleport": self.teleport,
            "seed": self.seed,
            "restarts": self.restarts,
        }


Symmetrize = Callable[[WeightedDigraph], WeightedDigraph]


def _spectral(variant: LaplacianVariant, symmetrize: Symmetrize):
    def run(g: WeightedDigraph, p: ClusterParams) -> Partition:
        return _drop_isolated(symmetrize(g).weights, lambda sub: spectral_cluster(
            sub, SpectralConfig(k=_require_k(p, sub), laplacian_variant=variant,
                                seed=p.seed, restarts=p.restarts)))
    return run


def _leiden(g: WeightedDigraph, p: ClusterParams) -> Partition:
    return _drop_isolated(simple_symmetrize(g).weights,
                          lambda sub: leiden(sub, LeidenConfig(gamma=p.gamma, seed=p.seed)))


def _walktrap(g: WeightedDigraph, p: ClusterParams) -> Partition:
    if p.k is not None:
        _check_k_range(p.k, g.n)
    return _drop_isolated(simple_symmetrize(g).weights, lambda sub: walktrap(
        sub, WalktrapConfig(t=p.walk_length, k=p.k))[0])


def _cdl(g: WeightedDigraph, p: ClusterParams) -> Partition:
    return cdl_cluster(g.weights, CdlConfig(k=_require_k(p, g.weights), teleport=p.teleport,
                                            seed=p.seed, restarts=p.restarts))


def _svd(g: WeightedDigraph, p: ClusterParams) -> Partition:
    if p.d is not None and not 1 <= p.d <= g.n:
        raise ConfigError(f"latent dimension d must lie in 1..{g.n}, got {p.d}")
    return svd_cluster(g.weights, SvdConfig(k=_require_k(p, g.weights), d=p.d,
                                            seed=p.seed, restarts=p.restarts))


def _randwalk(g: WeightedDigraph, p: ClusterParams) -> Partition:
    return randwalk_cluster(g.weights, RandWalkConfig(k=_require_k(p, g.weights), teleport=p.teleport,
                                                      seed=p.seed, restarts=p.restarts))


ALGORITHMS: Dict[str, Callable[[WeightedDigraph, ClusterParams], Partition]] = {
    "spectral-unnorm": _spectral(LaplacianVariant.UNNORMALIZED, simple_symmetrize),
    "spectral-norm": _spectral(LaplacianVariant.NORMALIZED, simple_symmetrize),
    "leiden": _leiden,
    "walktrap": _walktrap,
    "simple-sym": _spectral(LaplacianVariant.NORMALIZED, simple_symmetrize),
    "bibliometric": _spectral(LaplacianVariant.NORMALIZED, bibliometric_symmetrize),
    "cdl": _cdl,
    "svd": _svd,
    "randwalk": _randwalk,
}


def _check_k_range(k: int, n: int) -> None:
    if not 2 <= k <= n:
        raise ConfigError(f"k must lie in 2..{n}, got {k}")


def _require_k(p: ClusterParams, W: np.ndarray) -> int:
    if p.k is None:
        raise ConfigError(f"algorithm '{p.algorithm}' needs --k")
    _check_k_range(p.k, W.shape[0])
    return p.k


def _drop_isolated(Wu: np.ndarray, run: Callable[[np.ndarray], Partition]) -> Partition:
    """Cluster the non-isolated part of a symmetric matrix; isolated nodes get -1."""
    dropped = isolated_nodes(Wu)
    if not dropped:
        return run(without_self_loops(Wu))
    keep = np.setdiff1d(np.arange(Wu.shape[0]), dropped)
    logger.warning("%d node(s) have no edges after symmetrization; labelled -1", len(dropped))
    inner = run(without_self_loops(Wu[np.ix_(keep, keep)]))
    labels = np.full(Wu.shape[0], UNASSIGNED, dtype=np.int64)
    labels[keep] = inner.labels
    flags = dict(inner.flags)
    flags["unassigned_after_symmetrization"] = len(dropped)
    return Partition(labels, inner.k, flags)


def run_clustering(g: WeightedDigraph, params: ClusterParams) -> Partition:
    """
    Run one algorithm on a graph.

    Self-loops are zeroed and isolated nodes removed first; those nodes carry
    label -1 in the returned partition, whose labels are canonical (first
    appearance order).
    """
    if params.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm '{params.algorithm}'")

    g = g.with_weights(without_self_loops(g.weights), g.counts)
    isolated = isolated_nodes(g)
    keep = np.setdiff1d(np.arange(g.n), isolated)
    if isolated:
        logger.warning("dropping %d isolated node(s) before clustering", len(isolated))

    inner = ALGORITHMS[params.algorithm](induced_subgraph(g, keep), params)

    labels = np.full(g.n, UNASSIGNED, dtype=np.int64)
    labels[keep] = inner.labels
    flags = dict(inner.flags)
    flags["isolated_nodes"] = [g.node_ids[i] for i in isolated]
    return Partition(labels, inner.k, flags).canonical()
