"""Integrals of powered condition numbers over product measures, separation
certificates, and numerical verification of the comparison bounds.

Exact integrals enumerate every ordered atom tuple (including diagonal tuples,
where the condition numbers vanish) up to a tuple-evaluation cap; beyond the
cap the seeded Monte-Carlo estimator takes over.  Both paths reduce in a fixed
chunk order, so results are bit-identical across runs for a fixed seed.

Certificate search follows a two-stage scheme: exhaustive scoring of singleton
tuples, then greedy set growth that trades volume floor for mass floor while
the floor stays above a fraction of the singleton optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMeasureError,
    EnumerationCapError,
    NumericalError,
)
from .gcn import GcnKind, as_kind, batch_min_edge, eval_batch, _batch_gram_det
from .hilbert_core import elementary_symmetric
from .measure import DiscreteMeasure, center_of_mass, diameter, ls_flat, spectral_summary

DEFAULT_CAP = 10**8
CHUNK = 1 << 16
PASS_SLACK = 1e-9

ANCHOR_NONE = "none"
ANCHOR_CM_SIMPLEX = "xcm_plus_d1"  # center of mass plus d+1 free vertices
ANCHOR_CM_FACE = "xcm_plus_d"  # center of mass plus d free vertices

THEOREM_IDS = (
    "main_1",
    "lower_dls",
    "pol_upper",
    "anchored",
    "deshpande",
    "singvals",
    "main_modified",
)


@dataclass(frozen=True)
class IntegralSpec:
    """What to integrate: which condition number, at which intrinsic
    dimension, to which power, over which tuple domain."""

    kind: GcnKind
    d: int
    p: float = 2.0
    anchor: str = ANCHOR_NONE
    tau: float | None = None
    mode: str = "exact"
    samples: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", as_kind(self.kind))
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        if not self.p > 0:
            raise ValueError("exponent p must be positive")
        if self.anchor == ANCHOR_CM_FACE:
            raise ValueError(
                "anchor 'xcm_plus_d' integrals are served by c_dsh_integral, not IntegralSpec"
            )
        if self.anchor not in (ANCHOR_NONE, ANCHOR_CM_SIMPLEX):
            raise ValueError(f"unknown anchor {self.anchor!r}")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.mode not in ("exact", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "monte_carlo" and self.samples < 1:
            raise ValueError("monte_carlo mode needs samples >= 1")

    @property
    def arity(self) -> int:
        """Number of free (random) vertices per tuple."""
        return self.d + 2 if self.anchor == ANCHOR_NONE else self.d + 1


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float


def _philox(seed: int) -> np.random.Generator:
    """Counter-based generator; the draw stream depends only on the seed."""
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _index_chunks(n_atoms: int, arity: int, cap: int):
    """Yield (chunk, arity) integer index arrays covering n_atoms**arity."""
    total = n_atoms**arity
    if total > cap:
        raise EnumerationCapError(
            f"{n_atoms}^{arity} = {total} tuple evaluations exceed the cap {cap}; "
            "use Monte-Carlo mode or raise the cap"
        )
    shape = (n_atoms,) * arity
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        yield np.stack(np.unravel_index(flat, shape), axis=1)


def _tuple_values(mu: DiscreteMeasure, idx: np.ndarray, spec: IntegralSpec,
                  diam_mu: float, cm: np.ndarray) -> np.ndarray:
    """c(X)^p for each index tuple, with the LE_tau restriction applied."""
    coords = mu.atoms[idx]
    if spec.anchor == ANCHOR_CM_SIMPLEX:
        head = np.broadcast_to(cm, (coords.shape[0], 1, mu.dim))
        coords = np.concatenate([head, coords], axis=1)
    vals = eval_batch(spec.kind, coords, diam_mu=diam_mu)
    if spec.p != 2.0:
        vals = vals**spec.p
    else:
        vals = vals * vals
    if spec.tau is not None:
        vals = np.where(batch_min_edge(coords) >= spec.tau * diam_mu, vals, 0.0)
    return vals


def integral_exact(mu: DiscreteMeasure, spec: IntegralSpec, cap: int = DEFAULT_CAP) -> float:
    """Exact product-measure integral of c(X)^p by full tuple enumeration."""
    diam_mu = diameter(mu)
    if spec.kind is GcnKind.VOL_MU and diam_mu == 0.0:
        raise DegenerateMeasureError("vol_mu integral undefined for a one-point support")
    cm = center_of_mass(mu)
    chunk_sums: list[float] = []
    for idx in _index_chunks(mu.n_atoms, spec.arity, cap):
        vals = _tuple_values(mu, idx, spec, diam_mu, cm)
        wprod = np.prod(mu.weights[idx], axis=1)
        chunk_sums.append(float(np.sum(wprod * vals)))
    return math.fsum(chunk_sums)


def integral_mc(mu: DiscreteMeasure, spec: IntegralSpec) -> McEstimate:
    """Seeded Monte-Carlo estimate of the same integral.

    Tuples are drawn i.i.d. from the product measure by inverse CDF over the
    atom weights; with a fixed seed the estimate is bit-identical across
    runs (fixed chunking, fixed reduction order).
    """
    if spec.mode != "monte_carlo":
        raise ValueError("integral_mc requires spec.mode == 'monte_carlo'")
    diam_mu = diameter(mu)
    if spec.kind is GcnKind.VOL_MU and diam_mu == 0.0:
        raise DegenerateMeasureError("vol_mu integral undefined for a one-point support")
    cm = center_of_mass(mu)
    gen = _philox(spec.seed)
    cumw = np.cumsum(mu.weights)
    n = spec.samples
    sums: list[float] = []
    sq_sums: list[float] = []
    done = 0
    while done < n:
        c = min(CHUNK, n - done)
        u = gen.random((c, spec.arity))
        idx = np.minimum(np.searchsorted(cumw, u, side="right"), mu.n_atoms - 1)
        vals = _tuple_values(mu, idx, spec, diam_mu, cm)
        sums.append(float(np.sum(vals)))
        sq_sums.append(float(np.sum(vals * vals)))
        done += c
    total = math.fsum(sums)
    mean = total / n
    if n > 1:
        var = max(math.fsum(sq_sums) - n * mean * mean, 0.0) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return McEstimate(mean, se)


# ---------------------------------------------------------------------------
# Volume moments about the center of mass and the symmetric-function identity
# ---------------------------------------------------------------------------


def _volume_moment(mu: DiscreteMeasure, m: int, cap: int) -> float:
    if m == 0:
        return 1.0
    if m > mu.dim:
        return 0.0
    cm = center_of_mass(mu)
    chunk_sums: list[float] = []
    for idx in _index_chunks(mu.n_atoms, m, cap):
        edges = mu.atoms[idx] - cm
        dets = _batch_gram_det(edges)
        wprod = np.prod(mu.weights[idx], axis=1)
        chunk_sums.append(float(np.sum(wprod * dets)))
    return math.fsum(chunk_sums)


def volume_moment(mu: DiscreteMeasure, m: int, cap: int = DEFAULT_CAP) -> float:
    """Mean squared m-volume of simplices pinned at the center of mass:
    the integral of M_m(x_cm, x_1..x_m)^2 over ordered m-tuples of atoms."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return _volume_moment(mu, m, cap)


@dataclass(frozen=True)
class MomentIdentity:
    """Both sides of the moment/symmetric-polynomial identity.

    The enumeration oracle shows the volume moment equals m! times the m-th
    elementary symmetric polynomial of the squared singular values, not the
    polynomial alone; both normalizations are reported and kappa is their
    measured ratio.
    """

    lhs: float
    rhs_paper: float
    rhs_corrected: float
    kappa: float


def moment_identity_check(mu: DiscreteMeasure, m: int, cap: int = DEFAULT_CAP) -> MomentIdentity:
    lhs = volume_moment(mu, m, cap)
    sigma_sq = spectral_summary(mu).spectrum.values ** 2
    e_m = elementary_symmetric(sigma_sq, m)
    kappa = lhs / e_m if e_m > 0 else float("nan")
    return MomentIdentity(lhs, e_m, math.factorial(m) * e_m, kappa)


def c_dsh_integral(mu: DiscreteMeasure, d: int, cap: int = DEFAULT_CAP) -> float:
    """Ratio of consecutive volume moments: the mean squared fitting residual
    of volume-sampled d-flats through the center of mass.

    Equals both the face-form and the simplex-form integral of the
    moment-normalized condition number family.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    denom = 1.0 if d == 0 else _volume_moment(mu, d, cap)
    if denom <= 0.0:
        raise DegenerateMeasureError(
            f"volume moment of order {d} vanishes: the support lies in a {d - 1}-flat"
        )
    return _volume_moment(mu, d + 1, cap) / denom


def sym_tail_ratio(sigma, d: int) -> tuple[float, float]:
    """(e_{d+1}/e_d of the squared singular values, tail energy beyond d).

    The ratio never exceeds the tail; that inequality is asserted here as a
    sanity check since it holds for every nonnegative sequence.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    s2 = np.asarray(sigma, dtype=float).ravel() ** 2
    e_d = elementary_symmetric(s2, d)
    if e_d == 0.0:
        raise DegenerateMeasureError(f"e_{d}(sigma^2) = 0; ratio undefined")
    ratio = elementary_symmetric(s2, d + 1) / e_d
    tail = float(np.sum(s2[d:]))
    if ratio > tail * (1 + PASS_SLACK) + 1e-300:
        raise NumericalError("elementary-symmetric ratio exceeded the tail energy")
    return ratio, tail


# ---------------------------------------------------------------------------
# Separation certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationCertificate:
    """Witness sets for a separation property of the measure.

    ``sets`` holds the atom indices of each V_i; every tuple from their
    product satisfies the flavor's volume inequality with floor ``omega``,
    and each set has mass at least ``epsilon``.  The simplex flavor also
    carries outer sets U_i and the edge-length margin ``tau``.
    """

    flavor: str
    sets: tuple[tuple[int, ...], ...]
    omega: float
    epsilon: float
    tau: float | None = None
    outer_sets: tuple[tuple[int, ...], ...] | None = None


def _product_tuples(sets: list[list[int]]) -> np.ndarray:
    grids = np.meshgrid(*[np.asarray(s, dtype=int) for s in sets], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _plain_scores(mu, idx, d, diam):
    """M_d over tuples of atoms, normalized by diam^d."""
    coords = mu.atoms[idx]
    edges = coords[:, 1:, :] - coords[:, :1, :]
    return np.sqrt(_batch_gram_det(edges)) / diam**d


def _central_scores(mu, idx, d, diam, cm):
    edges = mu.atoms[idx] - cm
    return np.sqrt(_batch_gram_det(edges)) / diam**d


def _robust_scores(mu, idx, vm_d, cm):
    edges = mu.atoms[idx] - cm
    return _batch_gram_det(edges) / vm_d


def _face_min_scores(mu, idx, d, diam):
    """min over faces of M_d(X(i)) / diam^d for (d+2)-tuples."""
    coords = mu.atoms[idx]
    k = coords.shape[1]
    face_scores = []
    for i in range(k):
        face = np.delete(coords, i, axis=1)
        edges = face[:, 1:, :] - face[:, :1, :]
        face_scores.append(np.sqrt(_batch_gram_det(edges)))
    return np.min(np.stack(face_scores, axis=1), axis=1) / diam**d


def _score_fn(mu, flavor, d, diam, cm, vm_d):
    if flavor == "plain":
        return lambda idx: _plain_scores(mu, idx, d, diam)
    if flavor == "central":
        return lambda idx: _central_scores(mu, idx, d, diam, cm)
    if flavor == "robust":
        return lambda idx: _robust_scores(mu, idx, vm_d, cm)
    if flavor == "simplex_wrt":
        return lambda idx: _face_min_scores(mu, idx, d, diam)
    raise ValueError(f"unknown flavor {flavor!r}")


def _best_singleton(mu, arity, score, budget):
    best_score = -1.0
    best_tuple = None
    for idx in _index_chunks(mu.n_atoms, arity, budget):
        s = score(idx)
        j = int(np.argmax(s))
        if s[j] > best_score:
            best_score = float(s[j])
            best_tuple = idx[j].tolist()
    return best_score, best_tuple


def _product_floor(mu, sets, score, budget):
    total = math.prod(len(s) for s in sets)
    if total > budget:
        return None
    return float(np.min(score(_product_tuples(sets))))


def certify_separation(
    mu: DiscreteMeasure,
    d: int,
    flavor: str = "plain",
    search_budget: int = 2_000_000,
    grow_fraction: float = 0.5,
) -> SeparationCertificate | None:
    """Search for a separation certificate; None when no tuple of support
    atoms spans positive volume.

    Stage 1 scores every ordered singleton tuple and keeps the maximizer
    (ties broken by atom index).  Stage 2 greedily grows each set while the
    product-set volume floor stays above grow_fraction of the singleton
    optimum, and the returned snapshot maximizes omega^2 * epsilon^arity.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    diam = diameter(mu)
    cm = center_of_mass(mu)
    vm_d = None
    if flavor in ("plain", "central", "simplex_wrt") and diam == 0.0:
        return None
    if flavor == "robust":
        vm_d = _volume_moment(mu, d, search_budget) if d >= 1 else 1.0
        if vm_d <= 0.0:
            return None
    n_sets = {"plain": d + 1, "central": d, "robust": d, "simplex_wrt": d + 2}[flavor]
    score = _score_fn(mu, flavor, d, diam, cm, vm_d)

    if n_sets == 0:
        # Central/robust separation at d = 0 is carried by the pinned vertex
        # alone; the score of the empty tuple is 1 by the volume convention.
        return SeparationCertificate(flavor, (), 1.0, 1.0)

    best_score, best_tuple = _best_singleton(mu, n_sets, score, search_budget)
    if best_tuple is None or best_score <= 1e-12:
        return None

    sets = [[a] for a in best_tuple]
    floor = best_score

    def mass(s):
        return float(np.sum(mu.weights[np.asarray(s, dtype=int)]))

    def snapshot(cur_sets, cur_floor):
        eps = min(mass(s) for s in cur_sets)
        return cur_floor**2 * eps**n_sets, eps

    best_obj, eps = snapshot(sets, floor)
    best_sets = [list(s) for s in sets]
    best_floor, best_eps = floor, eps

    for i in range(n_sets):
        while True:
            # Among admissible additions to V_i, take the one that keeps the
            # product floor highest (ties broken by atom index).
            pick, pick_floor = None, -1.0
            for a in range(mu.n_atoms):
                if a in sets[i]:
                    continue
                candidate = [list(s) for s in sets]
                candidate[i].append(a)
                cand_floor = _product_floor(mu, candidate, score, search_budget)
                if cand_floor is None or cand_floor < grow_fraction * best_score:
                    continue
                if cand_floor > pick_floor:
                    pick, pick_floor = a, cand_floor
            if pick is None:
                break
            sets[i].append(pick)
            floor = pick_floor
            obj, eps = snapshot(sets, floor)
            if obj > best_obj:
                best_obj, best_sets = obj, [list(s) for s in sets]
                best_floor, best_eps = floor, eps

    cert_sets = tuple(tuple(sorted(s)) for s in best_sets)
    if flavor != "simplex_wrt":
        return SeparationCertificate(flavor, cert_sets, best_floor, best_eps)

    # Simplex flavor: keep the witness sets as singletons, grow outer sets to
    # push the edge-length margin up while the face-volume floor holds.
    outer = [list(s) for s in best_sets]
    out_floor = best_floor
    for i in range(n_sets):
        while True:
            pick, pick_floor = None, -1.0
            for a in range(mu.n_atoms):
                if a in outer[i]:
                    continue
                candidate = [list(s) for s in outer]
                candidate[i].append(a)
                cand_floor = _product_floor(mu, candidate, score, search_budget)
                if cand_floor is None or cand_floor < grow_fraction * best_score:
                    continue
                if cand_floor > pick_floor:
                    pick, pick_floor = a, cand_floor
            if pick is None:
                break
            outer[i].append(pick)
            out_floor = pick_floor
    tau = _edge_margin(mu, best_sets, outer) / diam
    return SeparationCertificate(
        flavor,
        cert_sets,
        out_floor,
        best_eps,
        tau=tau,
        outer_sets=tuple(tuple(sorted(s)) for s in outer),
    )


def _edge_margin(mu, inner_sets, outer_sets) -> float:
    """min over i of dist(V_i, complement of U_i); capped at diam(mu)."""
    diam = diameter(mu)
    margins = []
    all_atoms = set(range(mu.n_atoms))
    for v_set, u_set in zip(inner_sets, outer_sets):
        comp = sorted(all_atoms - set(u_set))
        if not comp:
            margins.append(diam)
            continue
        a = mu.atoms[np.asarray(v_set, dtype=int)]
        b = mu.atoms[np.asarray(comp, dtype=int)]
        diff = a[:, None, :] - b[None, :, :]
        margins.append(float(np.sqrt(np.min(np.einsum("ijk,ijk->ij", diff, diff)))))
    return min(margins)


def verify_certificate(mu: DiscreteMeasure, d: int, cert: SeparationCertificate,
                       budget: int = 10_000_000) -> bool:
    """Re-check a certificate by full enumeration over the product of its
    sets: mass floors, volume floors, and (simplex flavor) edge margins."""
    diam = diameter(mu)
    cm = center_of_mass(mu)
    vm_d = None
    if cert.flavor == "robust":
        vm_d = _volume_moment(mu, d, budget) if d >= 1 else 1.0
        if vm_d <= 0.0:
            return False
    score = _score_fn(mu, cert.flavor, d, diam, cm, vm_d)
    sets = [list(s) for s in cert.sets]
    for s in sets:
        if float(np.sum(mu.weights[np.asarray(s, dtype=int)])) < cert.epsilon * (1 - 1e-12):
            return False
    if not sets:
        return True
    check_sets = [list(s) for s in (cert.outer_sets or cert.sets)]
    if cert.outer_sets is not None:
        for v_set, u_set in zip(sets, check_sets):
            if not set(v_set) <= set(u_set):
                return False
        if cert.tau is not None and diam > 0:
            if _edge_margin(mu, sets, check_sets) < cert.tau * diam * (1 - 1e-12):
                return False
    floor = _product_floor(mu, check_sets, score, budget)
    if floor is None:
        raise EnumerationCapError("certificate product too large to verify under the budget")
    return floor >= cert.omega * (1 - PASS_SLACK)


def lemma_either_or(mu: DiscreteMeasure, d: int, cap: int = DEFAULT_CAP) -> tuple[bool, bool]:
    """Two equivalent nondegeneracy statements, evaluated independently.

    First flag: some ordered (d+1)-tuple of atoms spans positive d-volume
    (checked by enumeration).  Second flag: the (d-1)-dimensional fitting
    error is positive (checked through the spectrum).  They must agree.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    diam = diameter(mu)
    best = 0.0
    for idx in _index_chunks(mu.n_atoms, d + 1, cap):
        coords = mu.atoms[idx]
        edges = coords[:, 1:, :] - coords[:, :1, :]
        best = max(best, float(np.max(np.sqrt(_batch_gram_det(edges)))))
    has_simplex = best > 1e-12
    if d - 1 > mu.dim:
        e2_prev = 0.0
    else:
        e2_prev = ls_flat(mu, min(d - 1, mu.dim)).e2
    return has_simplex, bool(e2_prev > 1e-12 * max(diam, 1e-300))


def leger_constants(gamma: float, c_mu: float) -> tuple[float, float]:
    """Optimal constants of the annulus/tube mass argument for regular
    measures: the smallest admissible sine-comparison constant and the
    largest admissible inner-annulus ratio."""
    if not gamma > 1:
        raise ValueError("gamma must exceed 1")
    if not c_mu >= 1:
        raise ValueError("the regularity constant is at least 1")
    c0 = 0.5 * (4.0 * 5.0 ** (gamma / 2.0) * c_mu**2) ** (1.0 / (gamma - 1.0))
    alpha0 = (4.0 * c_mu**2) ** (-1.0 / gamma)
    return c0, alpha0


# ---------------------------------------------------------------------------
# Bound verification
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    """One verified inequality instance: the two sides, every constant that
    entered them, the certificate used (if any), and the verdict.

    ``passed`` is None when the check is not applicable (no certificate
    found, or no pass criterion supplied).
    """

    theorem_id: str
    lhs: float
    rhs: float
    constants: dict = field(default_factory=dict)
    certificate: SeparationCertificate | None = None
    passed: bool | None = None
    runtime_ms: float = 0.0

    @property
    def status(self) -> str:
        if self.passed is None:
            return "not-applicable"
        return "pass" if self.passed else "fail"


def _e2_sq(mu: DiscreteMeasure, d: int) -> float:
    if d >= mu.dim:
        return 0.0
    return ls_flat(mu, d).e2 ** 2


def _bound_holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1 + PASS_SLACK)


def _run_integral(mu, kind, d, params, anchor=ANCHOR_NONE, tau=None):
    params = params or {}
    mode = params.get("mode", "exact")
    if mode in ("mc", "monte_carlo"):
        spec = IntegralSpec(kind, d, anchor=anchor, tau=tau, mode="monte_carlo",
                            samples=int(params.get("samples", 100_000)),
                            seed=int(params.get("seed", 0)))
        return integral_mc(mu, spec).estimate
    spec = IntegralSpec(kind, d, anchor=anchor, tau=tau)
    return integral_exact(mu, spec, cap=int(params.get("cap", DEFAULT_CAP)))


def _get_certificate(mu, d, flavor, params):
    params = params or {}
    cert = params.get("certificate")
    if cert is not None:
        return cert
    return certify_separation(
        mu, d, flavor,
        search_budget=int(params.get("search_budget", 2_000_000)),
        grow_fraction=float(params.get("grow_fraction", 0.5)),
    )


def verify_bound(theorem_id: str, mu: DiscreteMeasure, d: int, params: dict | None = None) -> BoundReport:
    """Evaluate one comparison bound on the given measure and report both
    sides with all intermediate constants.

    Supported ids: main_1 (separation upper bound on the fitting error),
    lower_dls (fitting error dominates the dls integral), pol_upper
    (polar-integral/error ratio against a caller-supplied constant),
    anchored (pinned-vertex variants), deshpande (moment-ratio two-sided
    comparison, reported in both the printed and the factorial-corrected
    normalization), singvals (singular-value chain), main_modified
    (edge-length-restricted upper bound with its explicit constant).

    ``params`` may carry: certificate (pre-built), mode/samples/seed/cap for
    the integrals, bound (pol_upper pass criterion), search_budget and
    grow_fraction for the certificate search.
    """
    t0 = time.perf_counter()
    tid = theorem_id.replace("-", "_").lower()
    if tid not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id {theorem_id!r}")
    params = params or {}
    report = _dispatch_bound(tid, mu, d, params)
    report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report


def _dispatch_bound(tid, mu, d, params) -> BoundReport:
    e2sq = _e2_sq(mu, d)

    if tid == "main_1":
        cert = _get_certificate(mu, d, "plain", params)
        if cert is None:
            return BoundReport(tid, float("nan"), float("nan"),
                               {"reason": "no separation certificate"}, None, None)
        integ = _run_integral(mu, GcnKind.VOL_MU, d, params)
        rhs = integ / (cert.omega**2 * cert.epsilon ** (d + 1))
        consts = {"omega": cert.omega, "epsilon": cert.epsilon,
                  "integral_vol_mu_sq": integ, "e2_sq": e2sq}
        return BoundReport(tid, e2sq, rhs, consts, cert, _bound_holds(e2sq, rhs))

    if tid == "lower_dls":
        integ = _run_integral(mu, GcnKind.DLS, d, params)
        return BoundReport(tid, integ, e2sq, {"e2_sq": e2sq}, None, _bound_holds(integ, e2sq))

    if tid == "pol_upper":
        integ = _run_integral(mu, GcnKind.POL, d, params)
        ratio = integ / e2sq if e2sq > 0 else float("inf")
        bound = params.get("bound")
        consts = {"integral_pol_sq": integ, "e2_sq": e2sq, "ratio": ratio}
        if bound is None:
            return BoundReport(tid, ratio, float("nan"), consts, None, None)
        return BoundReport(tid, ratio, float(bound), consts, None, _bound_holds(ratio, float(bound)))

    if tid == "anchored":
        cert = _get_certificate(mu, d, "central", params)
        if cert is None:
            return BoundReport(tid, float("nan"), float("nan"),
                               {"reason": "no central separation certificate"}, None, None)
        i_vol = _run_integral(mu, GcnKind.VOL_MU, d, params, anchor=ANCHOR_CM_SIMPLEX)
        i_pol = _run_integral(mu, GcnKind.POL, d, params, anchor=ANCHOR_CM_SIMPLEX)
        i_dls = _run_integral(mu, GcnKind.DLS, d, params, anchor=ANCHOR_CM_SIMPLEX)
        rhs = i_vol / (cert.omega**2 * cert.epsilon**d)
        ok = _bound_holds(e2sq, rhs) and _bound_holds(i_dls, e2sq)
        consts = {
            "omega": cert.omega, "epsilon": cert.epsilon,
            "anchored_integral_vol_mu_sq": i_vol,
            "anchored_integral_dls_sq": i_dls, "e2_sq": e2sq,
            "anchored_pol_ratio": i_pol / e2sq if e2sq > 0 else float("inf"),
            "dls_side_pass": _bound_holds(i_dls, e2sq),
        }
        return BoundReport(tid, e2sq, rhs, consts, cert, ok)

    if tid == "deshpande":
        cert = _get_certificate(mu, d, "central", params)
        if cert is None:
            return BoundReport(tid, float("nan"), float("nan"),
                               {"reason": "no central separation certificate"}, None, None)
        cap = int(params.get("cap", DEFAULT_CAP))
        integ = c_dsh_integral(mu, d, cap=cap)
        rhs_corrected = (d + 1) * e2sq
        upper_rhs = integ / (cert.omega**2 * cert.epsilon**d)
        ok = _bound_holds(integ, rhs_corrected) and _bound_holds(e2sq, upper_rhs)
        consts = {
            "omega": cert.omega, "epsilon": cert.epsilon,
            "dsh_integral": integ, "e2_sq": e2sq,
            "rhs_paper": e2sq, "paper_form_pass": _bound_holds(integ, e2sq),
            "kappa_correction": float(d + 1),
            "upper_lhs_e2_sq": e2sq, "upper_rhs": upper_rhs,
            "upper_pass": _bound_holds(e2sq, upper_rhs),
        }
        return BoundReport(tid, integ, rhs_corrected, consts, cert, ok)

    if tid == "singvals":
        cert = _get_certificate(mu, d, "central", params)
        if cert is None:
            return BoundReport(tid, float("nan"), float("nan"),
                               {"reason": "no central separation certificate"}, None, None)
        sigma = spectral_summary(mu).spectrum.values
        ratio, tail = sym_tail_ratio(sigma, d)
        lhs = cert.omega**2 * cert.epsilon**d * tail
        ok = _bound_holds(lhs, ratio) and _bound_holds(ratio, tail)
        consts = {"omega": cert.omega, "epsilon": cert.epsilon,
                  "ratio": ratio, "tail": tail}
        return BoundReport(tid, lhs, ratio, consts, cert, ok)

    if tid == "main_modified":
        cert = _get_certificate(mu, d, "simplex_wrt", params)
        if cert is None:
            return BoundReport(tid, float("nan"), float("nan"),
                               {"reason": "no simplex separation certificate"}, None, None)
        integ = _run_integral(mu, GcnKind.VOL_MU, d, params, tau=cert.tau)
        w2, eps = cert.omega**2, cert.epsilon
        constant = 4.0 / (w2 * eps ** (d + 1)) * (1.0 + 4.0 * (d + 1) ** 2 + 4.0 * (d + 1) / (w2 * eps))
        rhs = constant * integ
        consts = {"omega": cert.omega, "epsilon": eps, "tau": cert.tau,
                  "constant": constant, "integral_restricted": integ, "e2_sq": e2sq}
        return BoundReport(tid, e2sq, rhs, consts, cert, _bound_holds(e2sq, rhs))

    raise AssertionError(tid)


# ---------------------------------------------------------------------------
# Concentration experiment for the empirical estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationSummary:
    """Observed success frequencies of the empirical sandwich bounds against
    their theoretical probability floors."""

    n_samples: int
    trials: int
    delta: float
    kappa: float
    dls_integral: float
    omega: float
    epsilon: float
    freq_left: float
    freq_sandwich: float
    floor_sandwich: float
    freq_sandwich_eps: float | None
    floor_sandwich_eps: float | None
    runtime_ms: float


def concentration_experiment(
    mu: DiscreteMeasure,
    d: int,
    n_samples: int,
    trials: int,
    delta: float,
    seed: int,
    certificate: SeparationCertificate | None = None,
    cap: int = DEFAULT_CAP,
) -> ConcentrationSummary:
    """Draw repeated i.i.d. samples, compute the empirical fitting error and
    the empirical dls integral, and measure how often the two-sided
    comparison holds.

    The lower side (dls integral below the fitting error) is deterministic
    and must hold in every trial; the upper side holds with probability at
    least the reported floors.
    """
    t0 = time.perf_counter()
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    cert = certificate or certify_separation(mu, d, "plain")
    if cert is None:
        raise DegenerateMeasureError("measure is not separated; no certificate found")
    diam = diameter(mu)
    dls_spec = IntegralSpec(GcnKind.DLS, d)
    dls_integral = integral_exact(mu, dls_spec, cap=cap)
    kappa = delta / ((d + 2) * diam**2) * dls_integral

    gen = _philox(seed)
    cumw = np.cumsum(mu.weights)
    w2, eps = cert.omega**2, cert.epsilon
    c43 = (1 + delta) / (1 - delta) / (w2 * eps ** (d + 1))
    use44 = delta < eps
    c44 = 1.0 / (w2 * (eps - delta) ** (d + 1)) if use44 else None

    n_left = n_43 = n_44 = 0
    for _ in range(trials):
        u = gen.random(n_samples)
        idx = np.minimum(np.searchsorted(cumw, u, side="right"), mu.n_atoms - 1)
        counts = np.bincount(idx, minlength=mu.n_atoms)
        keep = counts > 0
        sub = DiscreteMeasure(mu.atoms[keep], counts[keep] / n_samples)
        c_hat = integral_exact(sub, dls_spec, cap=cap)
        e_hat = _e2_sq(sub, d)
        left = c_hat <= e_hat * (1 + PASS_SLACK) + 1e-300
        right43 = e_hat <= c43 * c_hat * (1 + PASS_SLACK)
        n_left += left
        n_43 += left and right43
        if use44:
            n_44 += left and (e_hat <= c44 * c_hat * (1 + PASS_SLACK))

    floor43 = 1.0 - 2.0 * math.exp(-2.0 * n_samples * kappa**2)
    floor44 = 1.0 - (d + 1) * math.exp(-2.0 * n_samples * delta**2) if use44 else None
    return ConcentrationSummary(
        n_samples=n_samples,
        trials=trials,
        delta=delta,
        kappa=kappa,
        dls_integral=dls_integral,
        omega=cert.omega,
        epsilon=eps,
        freq_left=n_left / trials,
        freq_sandwich=n_43 / trials,
        floor_sandwich=floor43,
        freq_sandwich_eps=(n_44 / trials) if use44 else None,
        floor_sandwich_eps=floor44,
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )
