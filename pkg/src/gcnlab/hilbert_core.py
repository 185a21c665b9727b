"""Finite-dimensional linear-algebra kernel.

Gram determinants, distances to affine flats, eigendecomposition of weighted
covariance matrices, and elementary symmetric polynomials.  Everything here is
a pure function of immutable numpy inputs; the ambient space is R^D.

The eigensolver is a self-contained cyclic Jacobi iteration (deterministic,
dependency-free), adequate for the dense symmetric matrices of size up to a
few hundred that this library produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalError

ORTHO_TOL = 1e-10
NEG_CLAMP = -1e-12


def as_vector(x) -> np.ndarray:
    """Coerce to a finite 1-d float array (a point of R^D)."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatchError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


@dataclass(frozen=True)
class AffineFlat:
    """A d-flat: base point plus d orthonormal direction vectors (rows).

    ``basis`` may have zero rows, in which case the flat is the single
    point ``base``.
    """

    base: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base)
        basis = np.asarray(self.basis, dtype=float)
        if basis.size == 0:
            basis = basis.reshape(0, base.size)
        if basis.ndim != 2 or basis.shape[1] != base.size:
            raise DimensionMismatchError(
                f"basis shape {basis.shape} incompatible with base of dim {base.size}"
            )
        if basis.shape[0] > base.size:
            raise DimensionMismatchError("more basis vectors than ambient dimensions")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(basis.shape[0]), atol=ORTHO_TOL):
            raise ValueError("flat basis is not orthonormal within 1e-10")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.base.size

    def project(self, p) -> np.ndarray:
        """Orthogonal projection of a point onto the flat."""
        r = as_vector(p) - self.base
        return self.base + self.basis.T @ (self.basis @ r)


@dataclass(frozen=True)
class Spectrum:
    """Singular values (nonincreasing, >= 0) with matching orthonormal
    right vectors as rows."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        vectors = np.asarray(self.vectors, dtype=float)
        if np.any(values < 0):
            raise ValueError("singular values must be nonnegative")
        if np.any(np.diff(values) > 1e-12 * max(1.0, abs(float(values[0])) if values.size else 1.0)):
            raise ValueError("singular values must be nonincreasing")
        gram = vectors @ vectors.T
        if not np.allclose(gram, np.eye(vectors.shape[0]), atol=ORTHO_TOL):
            raise ValueError("spectral vectors are not orthonormal within 1e-10")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "vectors", vectors)

    def tail_energy(self, d: int) -> float:
        """Sum of squared singular values beyond the top d."""
        return float(np.sum(self.values[d:] ** 2))


def _as_matrix(vectors) -> np.ndarray:
    """Stack a sequence of same-dimension vectors as rows."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return np.asarray(vectors, dtype=float)
    rows = [as_vector(v) for v in vectors]
    if not rows:
        return np.zeros((0, 0))
    dim = rows[0].size
    for r in rows:
        if r.size != dim:
            raise DimensionMismatchError("vectors have mixed dimensions")
    return np.vstack(rows)


def gram_det(vectors) -> float:
    """Determinant of the Gram matrix of the given vectors.

    Zero when there are more vectors than ambient dimensions.  Tiny negative
    results from round-off (>= -1e-12 after scale normalization) are clamped
    to 0; anything more negative raises NumericalError.
    """
    m = _as_matrix(vectors)
    n = m.shape[0]
    if n == 0:
        return 1.0
    if n > m.shape[1]:
        return 0.0
    scale = float(np.max(np.linalg.norm(m, axis=1)))
    if scale == 0.0:
        return 0.0
    mn = m / scale
    det = float(np.linalg.det(mn @ mn.T))
    if det < NEG_CLAMP:
        raise NumericalError(f"Gram determinant {det} below clamp threshold")
    return max(det, 0.0) * scale ** (2 * n)


def dist_to_flat(p, flat: AffineFlat) -> float:
    """Euclidean distance from a point to an affine flat."""
    r = as_vector(p) - flat.base
    if r.size != flat.ambient_dim:
        raise DimensionMismatchError("point and flat live in different spaces")
    r = r - flat.basis.T @ (flat.basis @ r)
    return float(np.linalg.norm(r))


def jacobi_eigh(matrix, off_tol_scale: float = 1e-13, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until every off-diagonal entry is below off_tol_scale times the
    Frobenius norm of the input.  Returns (values, vectors) with eigenvalues
    sorted nonincreasing and eigenvectors as matching rows; ties keep the
    order in which the diagonal produced them (stable sort), so the result
    is deterministic.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError("expected a square matrix")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    if fro == 0.0 or n == 1:
        vals = np.diag(a).copy()
        order = np.argsort(-vals, kind="stable")
        return vals[order], v[:, order].T
    thresh = off_tol_scale * fro

    converged = False
    for _ in range(max_sweeps):
        od = a - np.diag(np.diag(a))
        if np.max(np.abs(od)) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if not converged:
        od = a - np.diag(np.diag(a))
        if np.max(np.abs(od)) > thresh:
            raise NumericalError("Jacobi eigensolver did not converge")
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order].T


def weighted_spectrum(points, weights, center) -> Spectrum:
    """Spectrum of the weighted second-moment matrix about ``center``.

    The returned values are sigma_i = sqrt(lambda_i) for the eigenvalues of
    C = sum_j w_j (x_j - center)(x_j - center)^T, nonincreasing, with the
    matching orthonormal eigenvectors.  Eigenvalues in [-1e-12, 0) are
    clamped to 0; more negative ones raise NumericalError.
    """
    pts = _as_matrix(points)
    w = np.asarray(weights, dtype=float)
    c = as_vector(center)
    if w.ndim != 1 or w.size != pts.shape[0]:
        raise DimensionMismatchError("weights length does not match points")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > 1e-10:
        raise ValueError("weights must sum to 1 within 1e-10")
    if c.size != pts.shape[1]:
        raise DimensionMismatchError("center dimension does not match points")
    x = pts - c
    cov = (x * w[:, None]).T @ x
    vals, vecs = jacobi_eigh(cov)
    scale = max(1.0, float(np.abs(vals).max()) if vals.size else 1.0)
    if np.any(vals < NEG_CLAMP * scale):
        raise NumericalError("second-moment matrix has a significantly negative eigenvalue")
    vals = np.maximum(vals, 0.0)
    return Spectrum(np.sqrt(vals), vecs)


def elementary_symmetric(values, k: int) -> float:
    """k-th elementary symmetric polynomial of the inputs.

    e_0 = 1 and e_k = 0 for k beyond the input length.  Uses the rolling
    one-item update e_k(v + [a]) = e_k(v) + a e_{k-1}(v), O(n k).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    vals = np.asarray(values, dtype=float).ravel()
    if k == 0:
        return 1.0
    if k > vals.size:
        return 0.0
    e = np.zeros(k + 1)
    e[0] = 1.0
    for i, a in enumerate(vals):
        top = min(k, i + 1)
        e[1 : top + 1] += a * e[0:top]
    return float(e[k])


def orthonormalize(vectors, tol: float) -> np.ndarray:
    """Orthonormal basis (rows) of the span, dropping residuals below tol.

    Modified Gram-Schmidt with one re-orthogonalization pass; tol is an
    absolute threshold on residual norms.
    """
    m = _as_matrix(vectors)
    basis: list[np.ndarray] = []
    for row in m:
        r = row.copy()
        for b in basis:
            r -= (r @ b) * b
        for b in basis:
            r -= (r @ b) * b
        nrm = float(np.linalg.norm(r))
        if nrm > tol:
            basis.append(r / nrm)
    if not basis:
        return np.zeros((0, m.shape[1] if m.ndim == 2 else 0))
    return np.vstack(basis)
