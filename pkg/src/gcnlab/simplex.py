"""Simplices as ordered vertex tuples, and their geometric functionals.

A k-simplex is an ordered tuple of k+1 points of R^D; repeated vertices are
legal inputs everywhere (the functionals then degrade to 0 instead of
raising, except where noted).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSimplexError, DimensionMismatchError
from .hilbert_core import AffineFlat, dist_to_flat, gram_det, orthonormalize

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Simplex:
    """Ordered (k+1)-tuple of vertices in R^D, stored as array rows."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionMismatchError(f"expected a (k+1, D) vertex array, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("simplex has non-finite vertices")
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]


def as_simplex(x) -> Simplex:
    return x if isinstance(x, Simplex) else Simplex(np.asarray(x, dtype=float))


def volume(x) -> float:
    """Parallelotope n-volume spanned by the edges from vertex 0.

    Zero exactly when the vertices are affinely dependent.
    """
    v = as_simplex(x).vertices
    if v.shape[0] < 2:
        raise DimensionMismatchError("volume needs at least 2 vertices")
    edges = v[1:] - v[0]
    return float(np.sqrt(gram_det(edges)))


def _pairwise(v: np.ndarray) -> np.ndarray:
    diff = v[:, None, :] - v[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def diam(x) -> float:
    """Maximal edge length."""
    v = as_simplex(x).vertices
    if v.shape[0] < 2:
        raise DimensionMismatchError("diam needs at least 2 vertices")
    return float(np.max(_pairwise(v)))


def min_edge(x) -> float:
    """Minimal edge length."""
    v = as_simplex(x).vertices
    k = v.shape[0]
    if k < 2:
        raise DimensionMismatchError("min_edge needs at least 2 vertices")
    d = _pairwise(v)
    return float(np.min(d[np.triu_indices(k, 1)]))


def max_at0(x) -> float:
    """Largest edge length at vertex 0."""
    v = as_simplex(x).vertices
    if v.shape[0] < 2:
        raise DimensionMismatchError("max_at0 needs at least 2 vertices")
    return float(np.max(np.linalg.norm(v[1:] - v[0], axis=1)))


def min_at0(x) -> float:
    """Smallest edge length at vertex 0."""
    v = as_simplex(x).vertices
    if v.shape[0] < 2:
        raise DimensionMismatchError("min_at0 needs at least 2 vertices")
    return float(np.min(np.linalg.norm(v[1:] - v[0], axis=1)))


def scale_at0(x) -> float:
    """Ratio min_at0 / max_at0, in (0, 1] for simplices with nonzero edges."""
    s = as_simplex(x)
    if min_edge(s) == 0.0:
        raise DegenerateSimplexError("scale_at0 undefined when the minimal edge is 0")
    return min_at0(s) / max_at0(s)


def remove_vertex(x, i: int) -> Simplex:
    """Drop vertex i, preserving the order of the rest."""
    v = as_simplex(x).vertices
    if not 0 <= i < v.shape[0]:
        raise IndexError(f"vertex index {i} out of range")
    return Simplex(np.delete(v, i, axis=0))


def replace_vertex(x, y, i: int) -> Simplex:
    """Replace vertex i with the point y."""
    v = as_simplex(x).vertices.copy()
    if not 0 <= i < v.shape[0]:
        raise IndexError(f"vertex index {i} out of range")
    v[i] = np.asarray(y, dtype=float)
    return Simplex(v)


def affine_span(x) -> AffineFlat:
    """Minimal affine flat containing the vertices.

    Numerical rank rule: edge directions whose Gram-Schmidt residual falls
    below 1e-10 times the largest edge length are treated as dependent.
    """
    v = as_simplex(x).vertices
    base = v[0]
    if v.shape[0] == 1:
        return AffineFlat(base, np.zeros((0, v.shape[1])))
    edges = v[1:] - base
    scale = float(np.max(np.linalg.norm(edges, axis=1)))
    basis = orthonormalize(edges, RANK_TOL * scale) if scale > 0 else np.zeros((0, v.shape[1]))
    return AffineFlat(base, basis)


def height(x, i: int) -> float:
    """Distance from vertex i to the affine span of the other vertices."""
    s = as_simplex(x)
    if s.n_vertices < 2:
        raise DimensionMismatchError("height needs at least 2 vertices")
    if not 0 <= i < s.n_vertices:
        raise IndexError(f"vertex index {i} out of range")
    rest = remove_vertex(s, i)
    return dist_to_flat(s.vertices[i], affine_span(rest))


def polar_sine(x, i: int) -> float:
    """High-dimensional sine of the simplex at vertex i.

    Volume divided by the product of the edge lengths at vertex i; exactly 0
    when any edge of the simplex is 0.
    """
    s = as_simplex(x)
    v = s.vertices
    if not 0 <= i < v.shape[0]:
        raise IndexError(f"vertex index {i} out of range")
    if min_edge(s) == 0.0:
        return 0.0
    lengths = np.linalg.norm(np.delete(v, i, axis=0) - v[i], axis=1)
    return volume(s) / float(np.prod(lengths))
