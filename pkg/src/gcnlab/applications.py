"""Downstream uses: multiway affinities for subspace clustering, and
volume-proportional flat sampling for randomized fitting.

The affinity pipeline samples vertex tuples, scores each with the polar
condition number, and folds the tuple affinities into a pairwise matrix whose
spectral embedding is clustered by k-means.  Volume sampling draws atom
tuples with probability proportional to the squared simplex volume pinned at
the center of mass and returns the spanned flat.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasureError
from .estimators import DEFAULT_CAP, _index_chunks, _philox, _volume_moment
from .gcn import GcnKind, eval_batch, _batch_gram_det
from .hilbert_core import AffineFlat, jacobi_eigh, orthonormalize
from .measure import DiscreteMeasure, center_of_mass
from .simplex import RANK_TOL


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric nonnegative pairwise affinities accumulated from sampled
    tuples, plus the tuning scale that produced them."""

    matrix: np.ndarray
    sigma: float
    sampled_tuples: int


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    k: int


def scc_affinities(
    points,
    d: int,
    sigma: float | None = None,
    tuples_per_point: int = 100,
    seed: int = 0,
) -> AffinityMatrix:
    """Pairwise affinities from sampled (d+2)-tuples.

    Each tuple (distinct indices, drawn uniformly) gets the affinity
    exp(-c_pol / (2 sigma^2)); that value is added to every index pair the
    tuple contains.  With sigma unset, the median sampled c_pol is used; a
    zero scale degrades gracefully to the {0,1} limit affinity.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n, k = pts.shape[0], d + 2
    if n < k:
        raise ValueError(f"need at least d+2 = {k} points, got {n}")
    if sigma is not None and not sigma > 0:
        raise ValueError("sigma must be positive")
    gen = _philox(seed)
    n_tuples = tuples_per_point * n
    # Uniform distinct-index tuples: first k slots of a random permutation,
    # realized by ranking one uniform row per tuple.
    u = gen.random((n_tuples, n))
    tuples = np.argsort(u, axis=1, kind="stable")[:, :k]
    cpol = eval_batch(GcnKind.POL, pts[tuples])
    if sigma is None:
        sigma = float(np.median(cpol))
    if sigma > 0:
        aff = np.exp(-cpol / (2.0 * sigma**2))
    else:
        aff = (cpol == 0.0).astype(float)
    w = np.zeros((n, n))
    for a in range(k):
        for b in range(a + 1, k):
            np.add.at(w, (tuples[:, a], tuples[:, b]), aff)
            np.add.at(w, (tuples[:, b], tuples[:, a]), aff)
    np.fill_diagonal(w, 0.0)
    return AffinityMatrix(w, float(sigma), n_tuples)


def _kmeans(rows: np.ndarray, k: int, seed: int, max_iter: int = 100) -> np.ndarray:
    n = rows.shape[0]
    gen = _philox(seed)
    centers = [int(gen.integers(n))]
    d2 = np.sum((rows - rows[centers[0]]) ** 2, axis=1)
    while len(centers) < k:
        centers.append(int(np.argmax(d2)))
        d2 = np.minimum(d2, np.sum((rows - rows[centers[-1]]) ** 2, axis=1))
    c = rows[centers].copy()
    labels = np.full(n, -1, dtype=int)
    for _it in range(max_iter):
        dists = np.sum((rows[:, None, :] - c[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                c[j] = rows[mask].mean(axis=0)
    return labels


def spectral_cluster(affinity: AffinityMatrix | np.ndarray, k: int, seed: int = 0) -> ClusterAssignment:
    """Normalized spectral embedding of the affinity matrix, clustered by
    k-means with deterministic farthest-point seeding."""
    w = affinity.matrix if isinstance(affinity, AffinityMatrix) else np.asarray(affinity, dtype=float)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = w.shape[0]
    if k == 1:
        return ClusterAssignment(np.zeros(n, dtype=int), 1)
    deg = w.sum(axis=1)
    if not np.any(deg > 0):
        warnings.warn("affinity matrix is identically zero; returning one cluster")
        return ClusterAssignment(np.zeros(n, dtype=int), k)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    s = inv_sqrt[:, None] * w * inv_sqrt[None, :]
    _, vecs = jacobi_eigh(s)
    emb = vecs[:k].T.copy()
    norms = np.linalg.norm(emb, axis=1)
    emb[norms > 0] /= norms[norms > 0, None]
    return ClusterAssignment(_kmeans(emb, k, seed), k)


def volume_sample_flat(mu: DiscreteMeasure, d: int, seed: int, cap: int = DEFAULT_CAP) -> AffineFlat:
    """Draw an ordered d-tuple of atoms with probability proportional to its
    product weight times the squared d-volume pinned at the center of mass;
    return the d-flat through the center spanned by the tuple."""
    if d < 1:
        raise ValueError("d must be at least 1")
    vm = _volume_moment(mu, d, cap)
    if vm <= 0.0:
        raise DegenerateMeasureError("volume moment vanishes; nothing to sample")
    cm = center_of_mass(mu)
    u = float(_philox(seed).random()) * vm
    acc = 0.0
    chosen = None
    for idx in _index_chunks(mu.n_atoms, d, cap):
        edges = mu.atoms[idx] - cm
        mass = np.prod(mu.weights[idx], axis=1) * _batch_gram_det(edges)
        cum = np.cumsum(mass)
        if acc + cum[-1] >= u:
            chosen = idx[int(np.searchsorted(cum, u - acc, side="right"))]
            break
        acc += cum[-1]
    if chosen is None:  # guard against top-edge round-off
        chosen = idx[-1]
    edges = mu.atoms[chosen] - cm
    scale = float(np.max(np.linalg.norm(edges, axis=1)))
    basis = orthonormalize(edges, RANK_TOL * scale)
    return AffineFlat(cm, basis)


def volume_sampling_expected_error(mu: DiscreteMeasure, d: int, cap: int = DEFAULT_CAP) -> float:
    """Mean squared fitting residual of volume-sampled d-flats, by exact
    enumeration over tuples.

    The residual of each flat is evaluated through trace projections, an
    independent route from the volume-moment ratio this quantity must equal.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    vm = _volume_moment(mu, d, cap)
    if vm <= 0.0:
        raise DegenerateMeasureError("volume moment vanishes; nothing to sample")
    cm = center_of_mass(mu)
    x = mu.atoms - cm
    cov = (x * mu.weights[:, None]).T @ x
    total_var = float(np.trace(cov))
    chunk_sums: list[float] = []
    for idx in _index_chunks(mu.n_atoms, d, cap):
        edges = mu.atoms[idx] - cm  # (c, d, D)
        dets = _batch_gram_det(edges)
        wprod = np.prod(mu.weights[idx], axis=1)
        mass = wprod * dets
        live = mass > 0
        resid = np.zeros(len(idx))
        if np.any(live):
            e = edges[live]
            g = e @ np.transpose(e, (0, 2, 1))
            ece = np.einsum("nad,de,nbe->nab", e, cov, e)
            sol = np.linalg.solve(g, ece)
            resid[live] = total_var - np.trace(sol, axis1=1, axis2=2)
        chunk_sums.append(float(np.sum(mass * resid)))
    return math.fsum(chunk_sums) / vm


def volume_sampling_probabilities(mu: DiscreteMeasure, d: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Full table of tuple probabilities used by volume_sample_flat, in
    lexicographic tuple order (diagnostic helper, small measures only)."""
    vm = _volume_moment(mu, d, cap)
    if vm <= 0.0:
        raise DegenerateMeasureError("volume moment vanishes; nothing to sample")
    cm = center_of_mass(mu)
    parts = []
    for idx in _index_chunks(mu.n_atoms, d, cap):
        edges = mu.atoms[idx] - cm
        parts.append(np.prod(mu.weights[idx], axis=1) * _batch_gram_det(edges))
    return np.concatenate(parts) / vm
