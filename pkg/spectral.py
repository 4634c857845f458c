"""Spectral clustering pipelines for undirected and directed weight matrices."""

import logging
import math
from typing import Tuple

import numpy as np

from config import KERNEL_MIN_STD, LATENT_GAP_EPS
from errors import DomainError, NumericError, SingularDegreeError
from graph_core import is_strongly_connected_aperiodic, undirected_weights, without_self_loops
from models import (
    CdlConfig,
    EigenPairs,
    KernelCenter,
    LaplacianVariant,
    Partition,
    RandWalkConfig,
    SpectralConfig,
    SvdConfig,
)
from numerics import eigh_symmetric, kmeans, second_eigenpair, stationary, svd, transition_matrix

logger = logging.getLogger(__name__)


def _positive_degrees(W: np.ndarray) -> np.ndarray:
    d = W.sum(axis=1)
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise SingularDegreeError(int(zero[0]), f"node {int(zero[0])} is isolated")
    return d


def laplacian(Wu: np.ndarray, variant: LaplacianVariant = LaplacianVariant.NORMALIZED) -> np.ndarray:
    """
    Graph Laplacian of a symmetric weight matrix (self-loops ignored).

    unnormalized: D - W.  normalized: L_rw = I - D^-1 W.
    """
    variant = LaplacianVariant(variant)
    W = undirected_weights(Wu)
    if variant == LaplacianVariant.UNNORMALIZED:
        return np.diag(W.sum(axis=1)) - W
    d = _positive_degrees(W)
    return np.eye(W.shape[0]) - W / d[:, None]


def laplacian_spectrum(Wu: np.ndarray, variant: LaplacianVariant = LaplacianVariant.NORMALIZED) -> EigenPairs:
    """
    Eigenpairs of the Laplacian, eigenvalues ascending.

    The normalized spectrum is computed on L_sym = I - D^-1/2 W D^-1/2; its
    eigenvectors x map to eigenvectors D^-1/2 x of L_rw, renormalized to unit length.
    """
    variant = LaplacianVariant(variant)
    W = undirected_weights(Wu)
    if variant == LaplacianVariant.UNNORMALIZED:
        return eigh_symmetric(np.diag(W.sum(axis=1)) - W)

    inv_sqrt = 1.0 / np.sqrt(_positive_degrees(W))
    L_sym = np.eye(W.shape[0]) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    pairs = eigh_symmetric(L_sym)
    vectors = inv_sqrt[:, None] * pairs.vectors
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
    return EigenPairs(values=pairs.values, vectors=vectors)


def _check_k(k: int, n: int) -> None:
    if not 2 <= k <= n:
        raise DomainError(f"k must lie in 2..{n}, got {k}")


def spectral_cluster(Wu: np.ndarray, cfg: SpectralConfig) -> Partition:
    """Embed nodes on the k smallest Laplacian eigenvectors and run k-means on the rows."""
    n = np.asarray(Wu).shape[0]
    _check_k(cfg.k, n)
    pairs = laplacian_spectrum(Wu, cfg.laplacian_variant)
    embedding = pairs.vectors[:, :cfg.k]
    result = kmeans(embedding, cfg.k, seed=cfg.seed, restarts=cfg.restarts)
    logger.info("%s spectral clustering: k=%d, inertia %.6g",
                cfg.laplacian_variant.value, cfg.k, result.inertia)
    return Partition(result.labels, cfg.k)


def _cdl_operator(W: np.ndarray, teleport: float) -> Tuple[np.ndarray, np.ndarray]:
    P = transition_matrix(without_self_loops(W), teleport)
    pi = stationary(P).pi
    if np.any(pi <= 0):
        raise NumericError("stationary distribution has zero entries; the chain is reducible")
    root = np.sqrt(pi)
    A = root[:, None] * P / root[None, :]
    L = np.eye(P.shape[0]) - 0.5 * (A + A.T)
    return L, pi


def cdl_laplacian(W: np.ndarray, teleport: float = 0.0) -> np.ndarray:
    """
    Chung's directed Laplacian L = I - (Pi^1/2 P Pi^-1/2 + Pi^-1/2 P^T Pi^1/2) / 2.

    P = D^-1 W (mixed with teleport eta when eta > 0) and Pi = diag(pi) for the
    stationary distribution pi of P. The result is symmetric by construction.
    """
    L, _ = _cdl_operator(W, teleport)
    return L


def cdl_cluster(W: np.ndarray, cfg: CdlConfig) -> Partition:
    """k-means on the k smallest eigenvectors of Chung's directed Laplacian."""
    W = without_self_loops(W)
    n = W.shape[0]
    _check_k(cfg.k, n)

    teleport = cfg.teleport
    flags = {"teleport_applied": False, "teleport": teleport}
    if teleport == 0.0 and not is_strongly_connected_aperiodic(W):
        teleport = cfg.auto_teleport
        flags = {"teleport_applied": True, "teleport": teleport}
        logger.warning("graph is not strongly connected and aperiodic; using teleport %.2f", teleport)

    pairs = eigh_symmetric(cdl_laplacian(W, teleport))
    result = kmeans(pairs.vectors[:, :cfg.k], cfg.k, seed=cfg.seed, restarts=cfg.restarts)
    return Partition(result.labels, cfg.k, flags)


def auto_latent_dim(S: np.ndarray) -> int:
    """
    Latent dimension at the largest relative gap S[i-1] / max(S[i], eps * S[0])
    for i in 1..ceil(n/2).
    """
    S = np.asarray(S, dtype=float)
    n = S.size
    upper = min(math.ceil(n / 2), n - 1)
    if upper < 1 or S[0] <= 0:
        return 1
    floor = LATENT_GAP_EPS * S[0]
    ratios = [S[i - 1] / max(S[i], floor) for i in range(1, upper + 1)]
    return int(np.argmax(ratios)) + 1


def svd_embedding(W: np.ndarray, d: int) -> np.ndarray:
    """Rows of [U_d S_d^1/2 | V_d S_d^1/2]."""
    result = svd(W)
    root = np.sqrt(result.S[:d])
    return np.hstack([result.U[:, :d] * root, result.V[:, :d] * root])


def svd_cluster(W: np.ndarray, cfg: SvdConfig) -> Partition:
    """SVD spectral clustering on the concatenated left/right singular embedding."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    _check_k(cfg.k, n)
    d = cfg.d
    if d is None:
        d = auto_latent_dim(svd(W).S)
        logger.info("selected latent dimension d=%d", d)
    if not 1 <= d <= n:
        raise DomainError(f"latent dimension d must lie in 1..{n}, got {d}")
    result = kmeans(svd_embedding(W, d), cfg.k, seed=cfg.seed, restarts=cfg.restarts)
    return Partition(result.labels, cfg.k, {"latent_dim": d})


def gaussian_kernel(v: np.ndarray, center: KernelCenter = KernelCenter.MEAN) -> Tuple[np.ndarray, bool]:
    """
    w_i = exp(-(v_i - c)^2 / (2 s^2)) with s the sample standard deviation of v.

    c is the mean of v, or its minimum for center="min". A bandwidth below
    1e-14 gives w = 1 and the degenerate flag.

    Returns:
        (w, degenerate)
    """
    v = np.asarray(v, dtype=float)
    center = KernelCenter(center)
    sigma = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    if sigma <= KERNEL_MIN_STD:
        return np.ones_like(v), True
    c = v.mean() if center == KernelCenter.MEAN else v.min()
    return np.exp(-((v - c) ** 2) / (2.0 * sigma ** 2)), False


def randwalk_cluster(W: np.ndarray, cfg: RandWalkConfig) -> Partition:
    """Cluster the kernelized second eigenvector of the transition matrix."""
    W = without_self_loops(W)
    n = W.shape[0]
    _check_k(cfg.k, n)

    teleport = cfg.teleport
    flags = {"teleport_applied": False, "teleport": teleport}
    if teleport == 0.0 and np.any(W.sum(axis=1) <= 0):
        teleport = cfg.auto_teleport
        flags = {"teleport_applied": True, "teleport": teleport}
        logger.warning("some nodes have no outgoing weight; using teleport %.2f", teleport)

    pair = second_eigenpair(transition_matrix(W, teleport))
    v = pair.vector.real + pair.vector.imag
    w, flat = gaussian_kernel(v, cfg.kernel_center)
    flags["degenerate_spectrum"] = pair.degenerate
    flags["degenerate_kernel"] = flat
    result = kmeans(w, cfg.k, seed=cfg.seed, restarts=cfg.restarts)
    if result.repairs:
        flags["empty_cluster_repairs"] = result.repairs
    return Partition(result.labels, cfg.k, flags)
