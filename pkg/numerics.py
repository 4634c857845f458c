"""Dense linear-algebra kernels and k-means for graphs of a few hundred nodes."""

import logging
from typing import Optional

import numpy as np
from sklearn.cluster import kmeans_plusplus

from config import (
    DEGENERATE_GAP,
    FACTORIZATION_TOL,
    KMEANS_MAX_ITER,
    KMEANS_RESTARTS,
    SIGN_TOL,
    STATIONARY_MAX_ITER,
    STATIONARY_STEP_TOL,
    SYMMETRY_TOL,
    TIE_DECIMALS,
)
from errors import ConvergenceError, DomainError, NumericError, SingularDegreeError, ConfigError
from models import ComplexEigenPair, EigenPairs, KMeansResult, StationaryDistribution, SvdResult

logger = logging.getLogger(__name__)


def _as_finite_matrix(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise NumericError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError(f"{name} has non-finite entries")
    return A


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible component is positive."""
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        significant = np.flatnonzero(np.abs(vectors[:, j]) > SIGN_TOL)
        if significant.size and vectors[significant[0], j] < 0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def _check_residual(A: np.ndarray, rebuilt: np.ndarray, what: str) -> None:
    residual = np.linalg.norm(A - rebuilt)
    if residual > FACTORIZATION_TOL * max(np.linalg.norm(A), 1.0):
        raise NumericError(f"{what} residual {residual:.3g} exceeds tolerance")


def eigh_symmetric(A: np.ndarray) -> EigenPairs:
    """
    Full eigendecomposition of a symmetric matrix.

    Returns:
        Eigenvalues ascending with unit eigenvectors as columns, each sign-canonical.
    """
    A = _as_finite_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise NumericError(f"matrix must be square, got shape {A.shape}")
    scale = np.linalg.norm(A, np.inf)
    if np.linalg.norm(A - A.T, np.inf) > SYMMETRY_TOL * scale:
        raise NumericError("matrix is not symmetric")
    try:
        A = 0.5 * (A + A.T)
        values, vectors = np.linalg.eigh(A)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"symmetric eigensolver failed: {e}") from e
    _check_residual(A, (vectors * values) @ vectors.T, "eigendecomposition")
    return EigenPairs(values=values, vectors=_canonical_signs(vectors))


def svd(A: np.ndarray) -> SvdResult:
    """Singular value decomposition A = U diag(S) V^T, S descending, signs canonical on U."""
    A = _as_finite_matrix(A)
    try:
        U, S, Vt = np.linalg.svd(A)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"SVD failed: {e}") from e
    r = S.size
    _check_residual(A, (U[:, :r] * S) @ Vt[:r], "SVD")
    V = Vt.T.copy()
    U = U.copy()
    for j in range(min(U.shape[1], V.shape[1])):
        significant = np.flatnonzero(np.abs(U[:, j]) > SIGN_TOL)
        if significant.size and U[significant[0], j] < 0:
            U[:, j] = -U[:, j]
            V[:, j] = -V[:, j]
    return SvdResult(U=U, S=S, V=V)


def transition_matrix(W: np.ndarray, teleport: float = 0.0) -> np.ndarray:
    """
    Row-stochastic P = (1 - eta) D^-1 W + eta J / n.

    Rows of W with zero sum are replaced by the uniform row when eta > 0.

    Args:
        W: Nonnegative weight matrix.
        teleport: eta in [0, 1); 0 reproduces D^-1 W exactly.
    """
    W = _as_finite_matrix(W, "weight matrix")
    if not 0.0 <= teleport < 1.0:
        raise ConfigError(f"teleport must lie in [0, 1), got {teleport}")
    n = W.shape[0]
    d = W.sum(axis=1)
    dangling = np.flatnonzero(d <= 0)
    if dangling.size and teleport == 0.0:
        raise SingularDegreeError(int(dangling[0]), f"node {int(dangling[0])} has zero out-degree")

    P = np.divide(W, d[:, None], out=np.zeros_like(W), where=d[:, None] > 0)
    if dangling.size:
        P[dangling] = 1.0 / n
    if teleport > 0.0:
        P = (1.0 - teleport) * P + teleport / n
    return P


def stationary(P: np.ndarray,
               tol: float = STATIONARY_STEP_TOL,
               max_iter: int = STATIONARY_MAX_ITER) -> StationaryDistribution:
    """
    Left power iteration pi <- pi P from the uniform vector.

    Raises:
        ConvergenceError: if ||delta||_1 stays above tol for max_iter steps.
    """
    P = _as_finite_matrix(P, "transition matrix")
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return StationaryDistribution(pi=nxt, iterations=iteration)
        pi = nxt
    raise ConvergenceError(f"stationary distribution did not converge in {max_iter} iterations")


def second_eigenpair(P: np.ndarray) -> ComplexEigenPair:
    """
    Eigenpair at position 1 when eigenvalues are sorted by modulus descending,
    then real part descending, then nonnegative imaginary part first.

    When that eigenvalue equals the leading one, the eigenspace direction
    farthest from the constant vector is returned and the pair is flagged.
    """
    P = _as_finite_matrix(P, "transition matrix")
    n = P.shape[0]
    if n < 2:
        raise NumericError("a second eigenpair needs at least 2 nodes")
    try:
        values, vectors = np.linalg.eig(P)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"eigensolver failed: {e}") from e

    moduli = np.round(np.abs(values), TIE_DECIMALS)
    reals = np.round(values.real, TIE_DECIMALS)
    lower_half = (values.imag < -SIGN_TOL).astype(int)
    order = np.lexsort((np.arange(n), lower_half, -reals, -moduli))
    first, second = order[0], order[1]
    value = complex(values[second])
    degenerate = abs(abs(values[first]) - abs(values[second])) <= DEGENERATE_GAP

    if abs(values[second] - values[first]) <= 10.0 ** -TIE_DECIMALS:
        tied = [i for i in order if abs(values[i] - values[first]) <= 10.0 ** -TIE_DECIMALS]
        basis = vectors[:, tied]
        residual = basis - basis.mean(axis=0, keepdims=True)
        norms = np.linalg.norm(residual, axis=0)
        best = int(np.argmax(norms))
        if norms[best] > SIGN_TOL:
            vector = residual[:, best] / norms[best]
        else:
            vector = vectors[:, second]
    else:
        vector = vectors[:, second]

    vector = np.asarray(vector, dtype=complex)
    vector /= np.linalg.norm(vector)
    anchor = int(np.argmax(np.round(np.abs(vector), TIE_DECIMALS)))
    vector *= np.conj(vector[anchor]) / abs(vector[anchor])

    if degenerate:
        logger.warning("second eigenvalue %s has the same modulus as the leading one", value)
    return ComplexEigenPair(value=value, vector=vector, degenerate=bool(degenerate))


def _squared_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum('ijk,ijk->ij', diff, diff)


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int):
    """Lloyd iterations from the given centres; returns labels, inertia, centres, history, repairs."""
    k = centers.shape[0]
    distances = _squared_distances(X, centers)
    labels = np.argmin(distances, axis=1)
    history = []
    repairs = 0
    for _ in range(max_iter):
        closest = distances[np.arange(len(X)), labels]
        new_centers = np.empty_like(centers)
        sizes = np.bincount(labels, minlength=k)
        taken = set()
        for c in range(k):
            if sizes[c]:
                new_centers[c] = X[labels == c].mean(axis=0)
                continue
            # empty cluster: reseed at the point farthest from its own centroid
            repairs += 1
            far = closest.copy()
            far[list(taken)] = -1.0
            idx = int(np.argmax(far))
            taken.add(idx)
            new_centers[c] = X[idx]
        centers = new_centers

        distances = _squared_distances(X, centers)
        new_labels = np.argmin(distances, axis=1)
        history.append(float(distances[np.arange(len(X)), new_labels].sum()))
        stable = np.array_equal(new_labels, labels)
        labels = new_labels
        if stable:
            break
    inertia = float(distances[np.arange(len(X)), labels].sum())
    return labels, inertia, centers, history, repairs


def kmeans(points: np.ndarray,
           k: int,
           seed: int = 0,
           restarts: int = KMEANS_RESTARTS,
           max_iter: int = KMEANS_MAX_ITER) -> KMeansResult:
    """
    k-means with k-means++ seeding, best of `restarts` runs by inertia.

    Args:
        points: m x p matrix (a vector is treated as m one-dimensional points).
        k: cluster count, 1 <= k <= m.
        seed: Seeds every restart; equal (points, seed, restarts) give equal output.
    """
    X = _as_finite_matrix(np.asarray(points, dtype=float).reshape(len(points), -1), "points")
    m = X.shape[0]
    if k < 1 or k > m:
        raise DomainError(f"k must lie in 1..{m}, got {k}")
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")

    run_seeds = np.random.default_rng(seed).integers(0, 2**31 - 1, size=restarts)
    best: Optional[KMeansResult] = None
    for run_seed in run_seeds:
        init, _ = kmeans_plusplus(X, n_clusters=k, random_state=int(run_seed))
        labels, inertia, centers, history, repairs = _lloyd(X, init.astype(float), max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels=labels.astype(np.int64), inertia=inertia, centers=centers,
                                inertia_history=history, repairs=repairs)
    if best.repairs:
        logger.info("k-means repaired %d empty cluster(s) in the best run", best.repairs)
    return best
