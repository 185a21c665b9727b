"""Batch front door: ingest point clouds, run one operation, emit a JSON
report.

Every run writes a single report object {command, inputs, outputs,
runtime_ms, library_version, seed} with canonical key order.  Exit codes:
0 success, 2 failed bound verification, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import estimators as est
from . import applications as apps
from .errors import GcnLabError
from .gcn import GcnKind, as_kind, evaluate
from .measure import DiscreteMeasure, ls_flat
from .report import dumps, to_jsonable
from .simplex import Simplex

_WEIGHT_NAMES = {"weight", "weights", "w"}


def _parse_float(token: str, path: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(f"{path}:{line_no}: cannot parse {token!r} as a number") from None
    if not np.isfinite(value):
        raise ValueError(f"{path}:{line_no}: non-finite value {token!r}")
    return value


def ingest(path, format: str | None = None, weighted: bool | None = None) -> DiscreteMeasure:
    """Load a measure from CSV rows ``x1,..,xD[,weight]`` or from JSON
    ``{"points": [[..]], "weights": [..]}``.

    A CSV header row is detected by a non-numeric first line; the weight
    column is taken when ``weighted`` is set, or when the header names its
    last column ``weight``.  Missing weights mean the uniform measure.
    Weights are renormalized to sum 1, with a warning when they were off by
    more than 1e-6.
    """
    path = str(path)
    if format is None:
        format = "json" if path.endswith(".json") else "csv"
    if format == "json":
        with open(path) as fh:
            obj = json.load(fh)
        points = np.asarray(obj["points"], dtype=float)
        weights = obj.get("weights")
        return _build_measure(points, None if weights is None else np.asarray(weights, dtype=float))
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")

    rows: list[list[float]] = []
    header: list[str] | None = None
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            row = [tok.strip() for tok in row if tok.strip() != ""]
            if not row:
                continue
            if not rows and header is None:
                try:
                    [float(tok) for tok in row]
                except ValueError:
                    header = row
                    continue
            rows.append([_parse_float(tok, path, line_no) for tok in row])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"{path}: ragged row {i + 1} (got {len(r)} fields, expected {width})")
    if weighted is None:
        weighted = header is not None and header[-1].strip().lower() in _WEIGHT_NAMES
    data = np.asarray(rows, dtype=float)
    if weighted:
        if width < 2:
            raise ValueError(f"{path}: weighted rows need at least one coordinate column")
        return _build_measure(data[:, :-1], data[:, -1])
    return _build_measure(data, None)


def _build_measure(points: np.ndarray, weights: np.ndarray | None) -> DiscreteMeasure:
    if points.ndim == 1:
        points = points[:, None]
    if weights is None:
        return DiscreteMeasure.uniform(points)
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive")
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-6:
        warnings.warn(f"weights sum to {total:.6g}; renormalizing to 1")
    return DiscreteMeasure(points, weights / total)


def _read_vertices(path) -> np.ndarray:
    mu = ingest(path)
    return mu.atoms


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcnlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dim=True):
        p.add_argument("--input", required=True, help="CSV or JSON point file")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--weighted", action="store_true", default=None,
                       help="treat the last CSV column as weights")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        if dim:
            p.add_argument("--dim", type=int, required=True, help="intrinsic dimension d")

    p = sub.add_parser("ls-error", help="least-squares fitting error of the measure")
    common(p)
    p.add_argument("--anchored", default=None, help="comma-separated point to pin the flat at")

    p = sub.add_parser("gcn-eval", help="one condition number of a single simplex")
    common(p, dim=False)
    p.add_argument("--gcn", required=True)
    p.add_argument("--diam-mu", type=float, default=None)

    p = sub.add_parser("integral", help="integral of a powered condition number")
    common(p)
    p.add_argument("--gcn", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--anchor", choices=["none", "xcm-plus-d1"], default="none")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=est.DEFAULT_CAP)

    p = sub.add_parser("moments", help="volume moment and its symmetric-function identity")
    common(p, dim=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cap", type=int, default=est.DEFAULT_CAP)

    p = sub.add_parser("certify", help="search for a separation certificate")
    common(p)
    p.add_argument("--flavor", choices=["plain", "central", "robust", "simplex"], default="plain")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--grow-fraction", type=float, default=0.5)

    p = sub.add_parser("verify", help="verify one comparison bound")
    common(p)
    p.add_argument("--theorem", required=True)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=est.DEFAULT_CAP)
    p.add_argument("--bound", type=float, default=None, help="pass ratio for pol-upper")

    p = sub.add_parser("concentration", help="empirical sandwich-bound experiment")
    common(p)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=est.DEFAULT_CAP)

    p = sub.add_parser("scc", help="affinity construction and spectral clustering")
    common(p)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--tuples-per-point", type=int, default=100)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("volsample", help="draw one volume-sampled flat")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=est.DEFAULT_CAP)
    return parser


def _dispatch(args) -> tuple[dict, int | None, int]:
    """Run the subcommand; return (outputs, seed, exit_code)."""
    seed = getattr(args, "seed", None)
    cmd = args.command

    if cmd == "gcn-eval":
        vertices = _read_vertices(args.input)
        kind = as_kind(args.gcn)
        value = evaluate(kind, Simplex(vertices), diam_mu=args.diam_mu)
        return {"kind": kind.value, "d": vertices.shape[0] - 2, "value": value}, seed, 0

    mu = ingest(args.input, format=args.format, weighted=args.weighted)

    if cmd == "ls-error":
        anchored = None
        if args.anchored is not None:
            anchored = np.asarray([float(t) for t in args.anchored.split(",")])
        res = ls_flat(mu, args.dim, anchored=anchored)
        out = {"e2": res.e2, "e2_sq": res.e2**2, "unique": res.unique,
               "flat": {"base": res.flat.base, "basis": res.flat.basis}}
        return out, seed, 0

    if cmd == "integral":
        spec = est.IntegralSpec(
            kind=as_kind(args.gcn), d=args.dim, p=args.p,
            anchor=args.anchor.replace("-", "_"), tau=args.tau,
            mode="monte_carlo" if args.mode == "mc" else "exact",
            samples=args.samples, seed=args.seed,
        )
        if spec.mode == "monte_carlo":
            res = est.integral_mc(mu, spec)
            return {"estimate": res.estimate, "std_error": res.std_error,
                    "samples": spec.samples}, seed, 0
        value = est.integral_exact(mu, spec, cap=args.cap)
        return {"value": value}, seed, 0

    if cmd == "moments":
        check = est.moment_identity_check(mu, args.m, cap=args.cap)
        return {"m": args.m, "volume_moment": check.lhs, "e_m": check.rhs_paper,
                "rhs_corrected": check.rhs_corrected, "kappa": check.kappa}, seed, 0

    if cmd == "certify":
        flavor = "simplex_wrt" if args.flavor == "simplex" else args.flavor
        cert = est.certify_separation(mu, args.dim, flavor,
                                      search_budget=args.budget,
                                      grow_fraction=args.grow_fraction)
        return {"certificate": cert}, seed, 0

    if cmd == "verify":
        params = {"mode": args.mode, "samples": args.samples, "seed": args.seed,
                  "cap": args.cap}
        if args.bound is not None:
            params["bound"] = args.bound
        rep = est.verify_bound(args.theorem, mu, args.dim, params)
        return {"report": rep, "status": rep.status}, seed, (0 if rep.passed else 2)

    if cmd == "concentration":
        summary = est.concentration_experiment(
            mu, args.dim, args.samples, args.trials, args.delta, args.seed, cap=args.cap
        )
        return {"summary": summary}, seed, 0

    if cmd == "scc":
        aff = apps.scc_affinities(mu.atoms, args.dim, sigma=args.sigma,
                                  tuples_per_point=args.tuples_per_point, seed=args.seed)
        assign = apps.spectral_cluster(aff, args.k, seed=args.seed)
        return {"labels": assign.labels, "k": args.k, "sigma": aff.sigma,
                "sampled_tuples": aff.sampled_tuples}, seed, 0

    if cmd == "volsample":
        flat = apps.volume_sample_flat(mu, args.dim, args.seed, cap=args.cap)
        return {"flat": {"base": flat.base, "basis": flat.basis}}, seed, 0

    raise ValueError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("GCNLAB_THREADS")
    if threads is not None and (not threads.isdigit() or int(threads) < 1):
        print(f"error: GCNLAB_THREADS must be a positive integer, got {threads!r}", file=sys.stderr)
        return 1
    t0 = time.perf_counter()
    try:
        outputs, seed, code = _dispatch(args)
    except (GcnLabError, ValueError, KeyError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    inputs = {k: v for k, v in vars(args).items() if k not in ("command", "out") and v is not None}
    report = {
        "command": args.command,
        "inputs": to_jsonable(inputs),
        "outputs": to_jsonable(outputs),
        "runtime_ms": (time.perf_counter() - t0) * 1e3,
        "library_version": __version__,
        "seed": seed,
    }
    text = dumps(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
