"""Batch command line: ``fdc fit | gen-constraints | eval | grid``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .constraint_gen import Correctness, GroupSpec, generate_constraints
from .core import ConstraintSet, FdcConfig, FdcError
from .datasets import (
    encode_labels,
    read_constraints_csv,
    read_data_csv,
    read_matrix_csv,
    write_constraints_csv,
    write_memberships_csv,
)
from .kernel import KernelSpec, kernel_fit
from .mem import fit
from .metrics import MetricReport, evaluate

SCHEMA_VERSION = 1
BETA_GRID = tuple(round(0.02 * i, 2) for i in range(16))
MU_GRID = tuple(2.0**i for i in range(-10, 6))

log = logging.getLogger("fdc")


def restart_seeds(seed: int, restarts: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(restarts)]


def _run_one(job):
    """One restart; top-level so it can be shipped to worker processes."""
    X, cons, cfg, kernel, mu, labels = job
    t0 = time.perf_counter()
    if kernel == "none":
        model = fit(X, cons, cfg)
    else:
        model = kernel_fit(X, cons, cfg, KernelSpec(kernel, mu))
    elapsed = time.perf_counter() - t0
    row = {
        "seed": cfg.seed,
        "objective": model.objective_trace[-1],
        "k_effective": model.k_effective,
        "n_iter": model.n_iter,
        "converged": model.converged,
        "collapsed": model.collapsed,
        "deleted_clusters": [list(d) for d in model.deleted_clusters],
        "route_counts": dict(sorted(model.route_counts.items())),
        "reduction_psd_violations": model.reduction_psd_violations,
        "dbcd_unconverged": model.dbcd_unconverged,
    }
    if labels is not None:
        rep = evaluate(model.memberships, labels)
        row["metrics"] = {"ari_pct": rep.ari_pct, "nmi_pct": rep.nmi_pct, "acc_pct": rep.acc_pct}
    return row, model.memberships, list(model.objective_trace), elapsed


def _map(jobs, n_jobs: int):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def _mean_std(values) -> dict:
    a = np.asarray(values, dtype=float)
    return {"mean": float(a.mean()), "std": float(a.std())}


def aggregate(rows: list[dict]) -> dict:
    out = {"objective": _mean_std([r["objective"] for r in rows])}
    if rows and "metrics" in rows[0]:
        for key in rows[0]["metrics"]:
            out[key] = _mean_std([r["metrics"][key] for r in rows])
    return out


def _load(args):
    data, labels = read_data_csv(args.data)
    cons = read_constraints_csv(args.constraints) if args.constraints else ConstraintSet()
    if labels is not None:
        labels = encode_labels(labels)
    return data, labels, cons


def _config(args, seed, alpha=None, beta=None) -> FdcConfig:
    return FdcConfig(
        k_max=args.k,
        alpha=args.alpha if alpha is None else alpha,
        beta=args.beta if beta is None else beta,
        outer_tol=args.tol,
        dbcd_tol=args.dbcd_tol,
        max_outer_iters=args.max_iters,
        seed=seed,
    )


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_fit(args) -> int:
    data, labels, cons = _load(args)
    seeds = restart_seeds(args.seed, args.restarts)
    jobs = [(data, cons, _config(args, s), args.kernel, args.mu, labels) for s in seeds]
    results = _map(jobs, args.jobs)

    rows = []
    for r, (row, _, _, _) in enumerate(results):
        rows.append({"restart": r, **row})
    best = int(np.argmin([row["objective"] for row in rows]))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_memberships_csv(out / "memberships.csv", results[best][1])
    with (out / "trace.csv").open("w") as fh:
        fh.write("restart,iteration,objective\n")
        for r, (_, _, trace, _) in enumerate(results):
            for i, f in enumerate(trace):
                fh.write(f"{r},{i},{f!r}\n")
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": "fit",
        "config": {
            "k": args.k,
            "alpha": args.alpha,
            "beta": args.beta,
            "kernel": args.kernel,
            "mu": args.mu if args.kernel == "gaussian" else None,
            "tol": args.tol,
            "dbcd_tol": args.dbcd_tol,
            "max_iters": args.max_iters,
            "restarts": args.restarts,
        },
        "seed": args.seed,
        "data": {"path": str(args.data), "m": data.m, "n": data.n, "labels": labels is not None},
        "constraints": {"path": str(args.constraints) if args.constraints else None, "count": len(cons)},
        "restarts": rows,
        "aggregate": aggregate(rows),
        "best_restart": best,
    }
    _dump(out / "run.json", record)
    # wall times vary between runs, so they stay out of run.json
    _dump(out / "timings.json", {"wall_time_s": [t for (_, _, _, t) in results]})
    agg = record["aggregate"]
    msg = f"objective {agg['objective']['mean']:.6g}"
    if "ari_pct" in agg:
        msg += f", ARI {agg['ari_pct']['mean']:.2f}±{agg['ari_pct']['std']:.2f}"
    print(f"fit: {args.restarts} restart(s), {msg}; wrote {out}")
    return 0


def cmd_gen_constraints(args) -> int:
    data, labels = read_data_csv(args.data)
    if labels is None:
        raise FdcError(f"{args.data} has no 'label' column", "data")
    spec = GroupSpec(args.fraction, Correctness(args.correctness), args.knn, args.seed)
    cons = generate_constraints(data, encode_labels(labels), spec)
    write_constraints_csv(args.out, cons)
    print(f"gen-constraints: wrote {len(cons)} constraints to {args.out}")
    return 0


def cmd_eval(args) -> int:
    pred = read_matrix_csv(args.pred)
    if pred.ndim != 2:
        raise FdcError(f"{args.pred} is not a membership matrix", "pred")
    truth = read_matrix_csv(args.truth)
    if truth.ndim == 1:
        truth = encode_labels(truth)
    if truth.shape[0] != pred.shape[0]:
        raise FdcError(f"{args.truth} has {truth.shape[0]} rows, {args.pred} has {pred.shape[0]}", "truth")
    rep: MetricReport = evaluate(pred, truth, args.k_star)
    text = json.dumps({"schema_version": SCHEMA_VERSION, **rep.to_dict()}, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_grid(args) -> int:
    data, labels, cons = _load(args)
    if labels is None:
        raise FdcError(f"{args.data} has no 'label' column; grid search needs ground truth", "data")
    alphas = args.alphas
    betas = args.betas if args.betas is not None else BETA_GRID
    mus = (args.mus if args.mus is not None else MU_GRID) if args.kernel == "gaussian" else (None,)
    seeds = restart_seeds(args.seed, args.restarts)

    cells = [(a, b, mu) for a in alphas for b in betas for mu in mus]
    jobs = [
        (data, cons, _config(args, s, alpha=a, beta=b), args.kernel, mu, labels)
        for (a, b, mu) in cells
        for s in seeds
    ]
    results = _map(jobs, args.jobs)

    table = []
    for c, (a, b, mu) in enumerate(cells):
        rows = [results[c * len(seeds) + r][0] for r in range(len(seeds))]
        agg = aggregate(rows)
        table.append(
            {
                "alpha": a,
                "beta": b,
                "mu": mu,
                "ari_mean": agg["ari_pct"]["mean"],
                "ari_std": agg["ari_pct"]["std"],
                "nmi_mean": agg["nmi_pct"]["mean"],
                "nmi_std": agg["nmi_pct"]["std"],
                "objective_mean": agg["objective"]["mean"],
            }
        )
    ranked = sorted(range(len(table)), key=lambda i: (-table[i]["ari_mean"], -table[i]["nmi_mean"], i))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["alpha", "beta", "mu", "ari_mean", "ari_std", "nmi_mean", "nmi_std", "objective_mean"]
    with (out / "grid.csv").open("w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in table:
            fh.write(",".join("" if row[c] is None else repr(row[c]) for c in cols) + "\n")
    _dump(
        out / "grid.json",
        {
            "schema_version": SCHEMA_VERSION,
            "command": "grid",
            "k": args.k,
            "kernel": args.kernel,
            "restarts": args.restarts,
            "seed": args.seed,
            "best": [table[i] for i in ranked[: args.top]],
            "cells": table,
        },
    )
    b = table[ranked[0]]
    print(f"grid: {len(cells)} cell(s); best alpha={b['alpha']} beta={b['beta']} mu={b['mu']} ARI {b['ari_mean']:.2f}")
    return 0


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _add_fit_options(p):
    p.add_argument("--data", required=True, help="CSV of samples (optional 'label' column)")
    p.add_argument("--constraints", help="CSV with header p,q,s")
    p.add_argument("--k", type=int, required=True, help="upper bound on the cluster count")
    p.add_argument("--kernel", choices=["none", "gaussian", "linear"], default="none")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6, help="outer termination tolerance")
    p.add_argument("--dbcd-tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out-dir", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdc", description="Fuzzy discriminant clustering with fuzzy pairwise constraints")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="cluster a dataset")
    _add_fit_options(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=1.0, help="gaussian kernel width")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gen-constraints", help="simulate fuzzy pairwise constraints from labels")
    p.add_argument("--data", required=True)
    p.add_argument("--fraction", type=float, default=0.1, help="number of pairs as a multiple of m")
    p.add_argument("--correctness", choices=[c.value for c in Correctness], default="all-correct")
    p.add_argument("--knn", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_constraints)

    p = sub.add_parser("eval", help="score memberships against ground truth")
    p.add_argument("--pred", required=True, help="membership CSV")
    p.add_argument("--truth", required=True, help="label column or fuzzy membership CSV")
    p.add_argument("--k-star", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="grid search alpha/beta (and mu) by ARI")
    _add_fit_options(p)
    p.add_argument("--alphas", type=_floats, default=[0.0])
    p.add_argument("--betas", type=_floats, default=None)
    p.add_argument("--mus", type=_floats, default=None)
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_grid, alpha=0.0, beta=0.0, mu=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (FdcError, FileNotFoundError, OSError) as exc:
        print(f"fdc {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
