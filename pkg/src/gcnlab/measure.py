"""Finitely supported probability measures and their least-squares flats.

A DiscreteMeasure is a weighted atomic measure on R^D.  Its second-moment
spectrum about the center of mass determines both the best-fit d-flat and the
least-squares error for every d at once; the fitting error is the square root
of the tail eigenvalue sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError
from .hilbert_core import AffineFlat, Spectrum, weighted_spectrum

WEIGHT_TOL = 1e-10
UNIQUE_GAP = 1e-10


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms (rows) with strictly positive weights summing to 1."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] < 1 or atoms.shape[1] < 1:
            raise DimensionMismatchError(f"expected (N, D) atoms, got {atoms.shape}")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms have non-finite coordinates")
        if weights.ndim != 1 or weights.size != atoms.shape[0]:
            raise DimensionMismatchError("weights length does not match atoms")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(float(weights.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError("weights must sum to 1 within 1e-10")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / n))

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @cached_property
    def _summary(self) -> "SpectralSummary":
        cm = center_of_mass(self)
        spec = weighted_spectrum(self.atoms, self.weights, cm)
        return SpectralSummary(cm, spec, float(np.sum(spec.values**2)))


@dataclass(frozen=True)
class SpectralSummary:
    """Center of mass, second-moment spectrum about it, and total variance."""

    x_cm: np.ndarray
    spectrum: Spectrum
    total_variance: float


@dataclass(frozen=True)
class LsFlatResult:
    """Best-fit flat, its fitting error, and whether the flat is unique."""

    flat: AffineFlat
    e2: float
    unique: bool


def center_of_mass(mu: DiscreteMeasure) -> np.ndarray:
    return mu.weights @ mu.atoms


def diameter(mu: DiscreteMeasure) -> float:
    """Maximal pairwise atom distance (O(N^2))."""
    a = mu.atoms
    diff = a[:, None, :] - a[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))


def spectral_summary(mu: DiscreteMeasure) -> SpectralSummary:
    """Center of mass, singular values/vectors of the centered second-moment
    matrix, and the total variance (their energy)."""
    return mu._summary


def ls_flat(mu: DiscreteMeasure, d: int, anchored=None) -> LsFlatResult:
    """Best-fit d-flat of the measure and its least-squares error.

    The flat passes through the center of mass and is spanned by the top d
    spectral directions; e2 is the square root of the tail eigenvalue sum.
    With ``anchored`` set, fitting is restricted to flats through that point
    (the second moments are then taken about it instead of the mean).

    When the spectral gap at d closes, the minimizer is not unique and the
    ``unique`` flag is False; a deterministic representative is returned.
    """
    if not 0 <= d <= mu.dim:
        raise ValueError(f"d={d} out of range for ambient dimension {mu.dim}")
    if anchored is None:
        summ = spectral_summary(mu)
        base, spec = summ.x_cm, summ.spectrum
    else:
        base = np.asarray(anchored, dtype=float)
        spec = weighted_spectrum(mu.atoms, mu.weights, base)
    basis = spec.vectors[:d]
    e2 = float(np.sqrt(spec.tail_energy(d)))
    top = float(spec.values[0]) if spec.values.size else 0.0
    sigma_d = float(spec.values[d - 1]) if d >= 1 else np.inf
    sigma_next = float(spec.values[d]) if d < spec.values.size else 0.0
    unique = bool(sigma_d - sigma_next > UNIQUE_GAP * top) if d >= 1 else True
    return LsFlatResult(AffineFlat(base, basis), e2, unique)


def empirical_ls_error(samples, d: int) -> float:
    """Squared least-squares error of the uniform measure on the samples."""
    mu = DiscreteMeasure.uniform(np.asarray(samples, dtype=float))
    return ls_flat(mu, d).e2 ** 2


@dataclass(frozen=True)
class RegularityProbe:
    """Grid estimate of the upper-regularity constant max mu(B(x,t))/t^gamma."""

    c_est: float
    satisfied_upper: bool
    gamma: float
    radii: np.ndarray


def regularity_probe(mu: DiscreteMeasure, gamma: float, radii=None) -> RegularityProbe:
    """Probe ball-mass growth: max over atoms x and grid radii t of
    mu(B(x,t))/t^gamma.

    Diagnostic only — an atomic measure always violates upper regularity as
    t -> 0, so the flag speaks for the chosen grid, nothing more.  Default
    grid: diam * 2^-k for k = 1..8 (requires a spread-out measure).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    dm = diameter(mu)
    if radii is None:
        if dm == 0.0:
            raise ValueError("default radius grid undefined for a one-point support")
        radii = dm * 0.5 ** np.arange(1, 9)
    radii = np.asarray(radii, dtype=float).ravel()
    if radii.size == 0:
        raise ValueError("radii must be nonempty")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if dm > 0 and np.any(radii > dm * (1 + 1e-12)):
        raise ValueError("radii must not exceed the support diameter")
    a = mu.atoms
    diff = a[:, None, :] - a[None, :, :]
    dists = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    # ball masses: (n_atoms, n_radii)
    masses = np.sum((dists[:, :, None] <= radii[None, None, :]) * mu.weights[None, :, None], axis=1)
    ratios = masses / radii[None, :] ** gamma
    c_est = float(np.max(ratios))
    return RegularityProbe(c_est, bool(np.isfinite(c_est)), float(gamma), radii)
