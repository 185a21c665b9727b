"""Geometric condition numbers of (d+1)-simplices, scalar and batched.

Each condition number maps a simplex of d+2 vertices to a nonnegative scale
that vanishes exactly when the vertices lie on a common d-flat.  Degenerate
simplices (repeated vertices) return 0 rather than raising, so that integrals
over product measures can hit diagonal tuples.

The ``eval_batch`` entry point evaluates one kind over a stacked array of
simplices; it is the workhorse behind exact enumeration and Monte-Carlo
estimation and must agree with the scalar functions to round-off.
"""

from __future__ import annotations

import enum

import numpy as np

from . import simplex as sx
from .errors import DimensionMismatchError
from .hilbert_core import weighted_spectrum
from .simplex import RANK_TOL, as_simplex


class GcnKind(enum.Enum):
    """Closed enumeration of the condition-number variants."""

    VOL = "vol"
    VOL_MU = "vol_mu"
    POL = "pol"
    DLS = "dls"
    HT = "ht"
    CURVATURE_VOL = "curvature_vol"


def as_kind(kind) -> GcnKind:
    if isinstance(kind, GcnKind):
        return kind
    return GcnKind(str(kind).replace("-", "_"))


def _intrinsic_dim(x) -> int:
    s = as_simplex(x)
    if s.n_vertices < 2:
        raise DimensionMismatchError("condition numbers need at least 2 vertices (d >= 0)")
    return s.n_vertices - 2


def c_vol(x) -> float:
    """Simplex volume scaled by diam(X)^d; 0 for zero-diameter input."""
    s = as_simplex(x)
    d = _intrinsic_dim(s)
    dm = sx.diam(s)
    if dm == 0.0:
        return 0.0
    return sx.volume(s) / dm**d


def c_vol_mu(x, diam_mu: float) -> float:
    """Simplex volume scaled by a fixed external diameter to the power d."""
    if not diam_mu > 0:
        raise ValueError("diam_mu must be positive")
    s = as_simplex(x)
    d = _intrinsic_dim(s)
    return sx.volume(s) / float(diam_mu) ** d


def c_pol(x) -> float:
    """Diameter times the root-mean-square of the polar sines over vertices."""
    s = as_simplex(x)
    k = s.n_vertices
    dm = sx.diam(s)
    if dm == 0.0:
        return 0.0
    s2 = sum(sx.polar_sine(s, i) ** 2 for i in range(k))
    return dm * float(np.sqrt(s2 / k))


def c_dls(x, anchored=None) -> float:
    """Root-mean-square distance of the vertices to their best-fit d-flat.

    With ``anchored`` set, the minimization runs over flats through that
    point instead of all flats (the anchored variant used when a point of
    the optimal flat is known a priori).
    """
    s = as_simplex(x)
    d = _intrinsic_dim(s)
    v = s.vertices
    k = v.shape[0]
    w = np.full(k, 1.0 / k)
    center = np.mean(v, axis=0) if anchored is None else np.asarray(anchored, dtype=float)
    spec = weighted_spectrum(v, w, center)
    return float(np.sqrt(spec.tail_energy(d)))


def c_ht(x) -> float:
    """Minimal height: smallest distance from a vertex to the span of the rest."""
    s = as_simplex(x)
    if s.n_vertices < 2:
        raise DimensionMismatchError("c_ht needs at least 2 vertices")
    return min(sx.height(s, i) for i in range(s.n_vertices))


def curvature_vol(x) -> float:
    """Volume scaled by diam(X)^((d+1)^2); a curvature-type quantity, kept
    for computation only (no comparison bounds are attached to it)."""
    s = as_simplex(x)
    d = _intrinsic_dim(s)
    dm = sx.diam(s)
    if dm == 0.0:
        return 0.0
    return sx.volume(s) / dm ** ((d + 1) ** 2)


def evaluate(kind, x, *, diam_mu: float | None = None, anchored=None) -> float:
    """Scalar dispatch over GcnKind."""
    kind = as_kind(kind)
    if kind is GcnKind.VOL:
        return c_vol(x)
    if kind is GcnKind.VOL_MU:
        if diam_mu is None:
            raise ValueError("kind vol_mu requires diam_mu")
        return c_vol_mu(x, diam_mu)
    if kind is GcnKind.POL:
        return c_pol(x)
    if kind is GcnKind.DLS:
        return c_dls(x, anchored=anchored)
    if kind is GcnKind.HT:
        return c_ht(x)
    return curvature_vol(x)


# ---------------------------------------------------------------------------
# Batched evaluation over stacked simplices, shape (n, k, D)
# ---------------------------------------------------------------------------


def _batch_pairwise(v: np.ndarray) -> np.ndarray:
    diff = v[:, :, None, :] - v[:, None, :, :]
    return np.sqrt(np.einsum("nijd,nijd->nij", diff, diff))


def _batch_gram_det(edges: np.ndarray) -> np.ndarray:
    """Clamped Gram determinants of per-simplex edge stacks (n, m, D)."""
    n, m, dim = edges.shape
    if m == 0:
        return np.ones(n)
    if m > dim:
        return np.zeros(n)
    scale = np.sqrt(np.max(np.einsum("nmd,nmd->nm", edges, edges), axis=1))
    safe = np.where(scale > 0, scale, 1.0)
    e = edges / safe[:, None, None]
    g = e @ np.transpose(e, (0, 2, 1))
    det = np.linalg.det(g)
    det = np.maximum(det, 0.0)
    return det * safe ** (2 * m)


def _batch_volume(v: np.ndarray) -> np.ndarray:
    return np.sqrt(_batch_gram_det(v[:, 1:, :] - v[:, :1, :]))


def _batch_diam(v: np.ndarray) -> np.ndarray:
    return np.max(_batch_pairwise(v), axis=(1, 2))


def batch_min_edge(v: np.ndarray) -> np.ndarray:
    """Minimal edge length per stacked simplex (n, k, D) -> (n,)."""
    p = _batch_pairwise(v)
    k = v.shape[1]
    iu = np.triu_indices(k, 1)
    return np.min(p[:, iu[0], iu[1]], axis=1)


def _batch_heights(v: np.ndarray, i: int) -> np.ndarray:
    """Distance from vertex i to the span of the other vertices, batched."""
    n, k, dim = v.shape
    rest = np.delete(v, i, axis=1)
    base = rest[:, 0, :]
    y = v[:, i, :] - base
    m = k - 2
    if m == 0:
        return np.linalg.norm(y, axis=1)
    f = rest[:, 1:, :] - base[:, None, :]
    edge_sq = np.einsum("nmd,nmd->nm", f, f)
    scale_sq = np.max(edge_sq, axis=1)
    g = f @ np.transpose(f, (0, 2, 1))
    w, q = np.linalg.eigh(g)
    b = np.einsum("nmd,nd->nm", f, y)
    coef = np.einsum("nmj,nm->nj", q, b)
    keep = w > (RANK_TOL**2) * scale_sq[:, None]
    wsafe = np.where(keep, w, 1.0)
    proj_sq = np.sum(np.where(keep, coef**2 / wsafe, 0.0), axis=1)
    dist_sq = np.einsum("nd,nd->n", y, y) - proj_sq
    return np.sqrt(np.maximum(dist_sq, 0.0))


def _batch_dls(v: np.ndarray, d: int) -> np.ndarray:
    n, k, dim = v.shape
    center = np.mean(v, axis=1)
    x = v - center[:, None, :]
    cov = np.einsum("nkd,nke->nde", x, x) / k
    w = np.linalg.eigvalsh(cov)  # ascending
    w = np.maximum(w, 0.0)
    tail = max(dim - d, 0)
    if tail == 0:
        return np.zeros(n)
    return np.sqrt(np.sum(w[:, :tail], axis=1))


def _batch_pol(v: np.ndarray) -> np.ndarray:
    n, k, dim = v.shape
    p = _batch_pairwise(v)
    pmin = batch_min_edge(v)
    vol = _batch_volume(v)
    pdiag = p.copy()
    idx = np.arange(k)
    pdiag[:, idx, idx] = 1.0
    denom = np.prod(pdiag, axis=2)  # (n, k): product of edge lengths at each vertex
    nz = pmin > 0
    safe = np.where(denom > 0, denom, 1.0)
    sines = np.where(nz[:, None], vol[:, None] / safe, 0.0)
    s2 = np.sum(sines**2, axis=1)
    dm = np.max(p, axis=(1, 2))
    return dm * np.sqrt(s2 / k)


def eval_batch(kind, vertices: np.ndarray, *, diam_mu: float | None = None) -> np.ndarray:
    """Evaluate one condition number over stacked simplices (n, k, D)."""
    kind = as_kind(kind)
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 3 or v.shape[1] < 2:
        raise DimensionMismatchError(f"expected (n, k>=2, D) vertex stack, got {v.shape}")
    d = v.shape[1] - 2
    if kind is GcnKind.VOL:
        dm = _batch_diam(v)
        vol = _batch_volume(v)
        return np.where(dm > 0, vol / np.where(dm > 0, dm, 1.0) ** d, 0.0)
    if kind is GcnKind.VOL_MU:
        if diam_mu is None or not diam_mu > 0:
            raise ValueError("kind vol_mu requires a positive diam_mu")
        return _batch_volume(v) / float(diam_mu) ** d
    if kind is GcnKind.POL:
        return _batch_pol(v)
    if kind is GcnKind.DLS:
        return _batch_dls(v, d)
    if kind is GcnKind.HT:
        hts = np.stack([_batch_heights(v, i) for i in range(v.shape[1])], axis=1)
        return np.min(hts, axis=1)
    if kind is GcnKind.CURVATURE_VOL:
        dm = _batch_diam(v)
        vol = _batch_volume(v)
        return np.where(dm > 0, vol / np.where(dm > 0, dm, 1.0) ** ((d + 1) ** 2), 0.0)
    raise ValueError(f"unknown kind {kind}")
