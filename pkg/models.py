"""Data models for the taxigraph toolkit."""

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import (
    AUTO_TELEPORT,
    DEFAULT_SEED,
    DEFAULT_TELEPORT,
    KMEANS_RESTARTS,
    LEIDEN_MAX_LEVELS,
    TOOL_NAME,
    TOOL_VERSION,
    WALKTRAP_DEFAULT_T,
)
from errors import ConfigError, DomainError, NumericError

UNASSIGNED = -1  # label of nodes dropped before clustering


class WeightMode(str, Enum):
    """How trips between two areas become one edge weight."""
    MEAN_TRAVEL_TIME = "mean_travel_time"    # mean duration of trips i -> j
    TRIP_COUNT = "trip_count"                # number of trips i -> j
    INVERSE_MEAN_TIME = "inverse_mean_time"  # 1 / mean duration


class LaplacianVariant(str, Enum):
    """Graph Laplacian used by undirected spectral clustering."""
    UNNORMALIZED = "unnormalized"  # D - W
    NORMALIZED = "normalized"      # I - D^-1 W


class KernelCenter(str, Enum):
    """Where the Gaussian kernel of the random-walk pipeline is centred."""
    MEAN = "mean"
    MIN = "min"


@dataclass(frozen=True)
class TripRecord:
    """One taxi trip between two community areas."""

    pickup_area: int
    dropoff_area: int
    duration_seconds: float

    def __post_init__(self):
        if self.pickup_area <= 0 or self.dropoff_area <= 0:
            raise DomainError(
                f"area ids must be positive, got {self.pickup_area} -> {self.dropoff_area}"
            )
        if not self.duration_seconds >= 0:
            raise DomainError(f"trip duration must be nonnegative, got {self.duration_seconds}")


@dataclass(eq=False)
class WeightedDigraph:
    """Nodes plus a dense nonnegative weight matrix W and trip counts.

    weights[i][j] is the weight of edge i -> j; the diagonal holds intra-area trips.
    """

    node_ids: List[int]
    weights: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.node_ids = [int(a) for a in self.node_ids]
        self.weights = np.asarray(self.weights, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        n = len(self.node_ids)
        if len(set(self.node_ids)) != n:
            raise DomainError("node ids must be unique")
        if self.weights.shape != (n, n) or self.counts.shape != (n, n):
            raise DomainError(
                f"expected {n}x{n} matrices, got weights {self.weights.shape}, "
                f"counts {self.counts.shape}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise NumericError("edge weights must be finite")
        if np.any(self.weights < 0) or np.any(self.counts < 0):
            raise DomainError("edge weights and counts must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def edge_count(self) -> int:
        """Number of ordered pairs carrying an edge (trips observed or nonzero weight)."""
        return int(np.count_nonzero((self.counts > 0) | (self.weights != 0)))

    def with_weights(self, weights: np.ndarray, counts: Optional[np.ndarray] = None) -> 'WeightedDigraph':
        """Same node set, new weight matrix."""
        if counts is None:
            counts = (np.asarray(weights) > 0).astype(np.int64)
        return WeightedDigraph(list(self.node_ids), weights, counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.node_ids == other.node_ids
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.counts, other.counts)
        )


@dataclass
class DegreeInfo:
    """Out-degrees d_i = sum_j W[i][j]."""

    out_degree: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """Diagonal-matrix view D."""
        return np.diag(self.out_degree)


@dataclass
class Partition:
    """Node -> cluster assignment; label -1 marks nodes dropped before clustering."""

    labels: np.ndarray
    k: int
    flags: Dict[str, Any] = field(default_factory=dict)  # degenerate-case metadata

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 1:
            raise DomainError("labels must be a vector")
        if self.labels.size and (self.labels.max() >= self.k or self.labels.min() < UNASSIGNED):
            raise DomainError(f"labels must lie in -1..{self.k - 1}")

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def cluster_sizes(self) -> Dict[int, int]:
        """Sizes of the nonempty clusters, unassigned nodes excluded."""
        values, sizes = np.unique(self.labels[self.labels != UNASSIGNED], return_counts=True)
        return {int(v): int(s) for v, s in zip(values, sizes)}

    def canonical(self) -> 'Partition':
        """Relabel clusters by order of first appearance (label -1 kept)."""
        return Partition(canonical_labels(self.labels), self.k, dict(self.flags))


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters 0, 1, 2, ... in order of first appearance."""
    labels = np.asarray(labels, dtype=np.int64)
    mapping: Dict[int, int] = {}
    out = np.full(labels.shape, UNASSIGNED, dtype=np.int64)
    for i, label in enumerate(labels.tolist()):
        if label == UNASSIGNED:
            continue
        if label not in mapping:
            mapping[label] = len(mapping)
        out[i] = mapping[label]
    return out


@dataclass
class EigenPairs:
    """Ascending eigenvalues; column j of vectors is the unit eigenvector of values[j]."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass
class ComplexEigenPair:
    """One eigenpair of a (possibly non-symmetric) transition matrix."""

    value: complex
    vector: np.ndarray
    degenerate: bool = False  # |lambda_2| coincides with |lambda_1|


@dataclass
class SvdResult:
    """W = U diag(S) V^T with S sorted descending."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


@dataclass
class StationaryDistribution:
    """Left fixed point pi of a row-stochastic matrix, summing to 1."""

    pi: np.ndarray
    iterations: int = 0


@dataclass
class KMeansResult:
    """Best k-means run over all restarts."""

    labels: np.ndarray
    inertia: float
    centers: np.ndarray
    inertia_history: List[float] = field(default_factory=list)  # per Lloyd iteration
    repairs: int = 0  # empty-cluster repairs in the best run


@dataclass
class SpectralConfig:
    """Undirected spectral clustering parameters."""

    k: int
    laplacian_variant: LaplacianVariant = LaplacianVariant.NORMALIZED
    seed: int = DEFAULT_SEED
    restarts: int = KMEANS_RESTARTS

    def __post_init__(self):
        self.laplacian_variant = LaplacianVariant(self.laplacian_variant)
        _check_k(self.k)
        _check_restarts(self.restarts)


@dataclass
class SvdConfig:
    """SVD spectral clustering parameters; d=None selects the latent dimension automatically."""

    k: int
    d: Optional[int] = None
    seed: int = DEFAULT_SEED
    restarts: int = KMEANS_RESTARTS

    def __post_init__(self):
        _check_k(self.k)
        _check_restarts(self.restarts)
        if self.d is not None and self.d < 1:
            raise ConfigError(f"latent dimension d must be >= 1, got {self.d}")


@dataclass
class CdlConfig:
    """Chung directed-Laplacian clustering parameters."""

    k: int
    teleport: float = DEFAULT_TELEPORT
    seed: int = DEFAULT_SEED
    restarts: int = KMEANS_RESTARTS
    auto_teleport: float = AUTO_TELEPORT  # used when the chain is reducible or periodic

    def __post_init__(self):
        _check_k(self.k)
        _check_restarts(self.restarts)
        _check_teleport(self.teleport)
        _check_teleport(self.auto_teleport)


@dataclass
class RandWalkConfig:
    """Random-walk spectral clustering parameters."""

    k: int
    teleport: float = DEFAULT_TELEPORT
    seed: int = DEFAULT_SEED
    restarts: int = KMEANS_RESTARTS
    kernel_center: KernelCenter = KernelCenter.MIN
    auto_teleport: float = AUTO_TELEPORT  # used when a node has no outgoing weight

    def __post_init__(self):
        self.kernel_center = KernelCenter(self.kernel_center)
        _check_k(self.k)
        _check_restarts(self.restarts)
        _check_teleport(self.teleport)
        _check_teleport(self.auto_teleport)


@dataclass
class LeidenConfig:
    """Leiden parameters. gamma=None means the graph density.

    The CPM penalty is gamma * C(n_c, 2), the pair count of each cluster.
    """

    gamma: Optional[float] = None
    max_levels: int = LEIDEN_MAX_LEVELS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError(f"resolution gamma must be > 0, got {self.gamma}")
        if self.max_levels < 1:
            raise ConfigError(f"max_levels must be >= 1, got {self.max_levels}")


@dataclass
class WalktrapConfig:
    """Walktrap parameters; k=None cuts the dendrogram at maximum modularity."""

    t: int = WALKTRAP_DEFAULT_T
    k: Optional[int] = None

    def __post_init__(self):
        if self.t < 1:
            raise ConfigError(f"walk length t must be >= 1, got {self.t}")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class Merge:
    """Two clusters joined into cluster `merged` at height delta_sigma."""

    left: int
    right: int
    height: float
    merged: int


@dataclass
class Dendrogram:
    """Agglomeration history over n leaves; leaf ids are 0..n-1, merged ids count up from n."""

    n_leaves: int
    merges: List[Merge] = field(default_factory=list)

    def labels_after(self, n_merges: int) -> np.ndarray:
        """Flat labels after applying the first n_merges merges."""
        if not 0 <= n_merges <= len(self.merges):
            raise DomainError(f"dendrogram has {len(self.merges)} merges, asked for {n_merges}")
        members: Dict[int, List[int]] = {i: [i] for i in range(self.n_leaves)}
        for merge in self.merges[:n_merges]:
            members[merge.merged] = members.pop(merge.left) + members.pop(merge.right)
        labels = np.empty(self.n_leaves, dtype=np.int64)
        for label, cluster_id in enumerate(sorted(members, key=lambda c: min(members[c]))):
            labels[members[cluster_id]] = label
        return labels

    def cut(self, k: int) -> np.ndarray:
        """Flat labels with k clusters (or as few as the merges allow)."""
        n_merges = min(max(self.n_leaves - k, 0), len(self.merges))
        return self.labels_after(n_merges)


@dataclass
class AgreementReport:
    """Agreement between two partitions."""

    ari: float
    nmi: float
    contingency: np.ndarray
    excluded: int = 0  # nodes labelled -1 in either partition

    def to_dict(self) -> dict:
        return {
            "ari": float(self.ari),
            "nmi": float(self.nmi),
            "contingency": self.contingency.astype(int).tolist(),
            "excluded": int(self.excluded),
        }


@dataclass
class SbmSpec:
    """Directed weighted stochastic block model."""

    block_sizes: List[int]
    p_in: float
    p_out: float
    w_in: Tuple[float, float] = (1.0, 1.0)
    w_out: Tuple[float, float] = (1.0, 1.0)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        self.block_sizes = [int(b) for b in self.block_sizes]
        self.w_in = (float(self.w_in[0]), float(self.w_in[1]))
        self.w_out = (float(self.w_out[0]), float(self.w_out[1]))
        if any(b <= 0 for b in self.block_sizes):
            raise DomainError(f"block sizes must be positive, got {self.block_sizes}")
        for name, p in (("p_in", self.p_in), ("p_out", self.p_out)):
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {p}")
        for name, (lo, hi) in (("w_in", self.w_in), ("w_out", self.w_out)):
            if not 0.0 < lo <= hi:
                raise DomainError(f"{name} must satisfy 0 < lo <= hi, got {(lo, hi)}")

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d['w_in'] = list(self.w_in)
        d['w_out'] = list(self.w_out)
        return d


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run."""

    command: str
    parameters: Dict[str, Any]
    input_digest: Dict[str, str] = field(default_factory=dict)  # input path name -> sha256
    flags: Dict[str, Any] = field(default_factory=dict)
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> 'RunManifest':
        return cls(**d)


def _check_k(k: int) -> None:
    if k < 2:
        raise ConfigError(f"cluster count k must be >= 2, got {k}")


def _check_restarts(restarts: int) -> None:
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")


def _check_teleport(eta: float) -> None:
    if not 0.0 <= eta < 1.0:
        raise ConfigError(f"teleport must lie in [0, 1), got {eta}")
