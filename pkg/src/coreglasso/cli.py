"""Command-line front end.

Subcommands: fit, scores-from-graph, glasso, sample, eval,
group-compare, grid.  Every command is deterministic given its inputs,
flags and seed; each run writes a ``meta.json`` recording the resolved
hyperparameters, tool version and input checksums.

Exit codes: 0 success, 1 input/configuration error, 2 finished at an
iteration cap with results still written.
"""

import argparse
import os
import sys

import numpy as np

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .baselines import kcore_scores, minres_scores
from .bca import fit as bca_fit
from .corescore import scores_from_graph
from .errors import CoreglassoError
from .glasso import support, weighted_glasso
from .io import (
    read_features_csv,
    read_scores_json,
    read_square_csv,
    sha256_file,
    write_edges_tsv,
    write_json,
    write_matrix_csv,
    write_scores_json,
    write_trace_csv,
)
from .metrics import compare_methods, group_compare, support_recovery
from .model import (
    CoreScores,
    DistanceMatrix,
    Hyperparams,
    compute_weights,
    empirical_covariance,
)
from .synth import planted_scores, sample_coordinates, sample_instance

OUTDIR_ENV = "COREGLASSO_OUTDIR"


def _hyper_from_args(args) -> Hyperparams:
    return Hyperparams(
        lam=args.lam,
        e=args.e,
        M=args.M,
        eps_w=args.eps_w,
        glasso_tol=args.glasso_tol,
        lp_tol=args.lp_tol,
        bca_rel_tol=args.bca_rel_tol,
        bca_max_iter=args.bca_max_iter,
        glasso_max_iter=args.glasso_max_iter,
        ridge=args.ridge,
    )


def _add_hyper_flags(p, lam_default=0.1):
    p.add_argument("--lambda", dest="lam", type=float, default=lam_default,
                   help="penalty scale (default %(default)s)")
    p.add_argument("--e", type=float, default=0.0,
                   help="distance coupling; requires --distances when > 0")
    p.add_argument("--M", type=float, default=None,
                   help="core-mass budget (default N/8)")
    p.add_argument("--eps-w", dest="eps_w", type=float, default=1e-3)
    p.add_argument("--glasso-tol", type=float, default=1e-5)
    p.add_argument("--glasso-max-iter", type=int, default=1000)
    p.add_argument("--lp-tol", type=float, default=1e-9)
    p.add_argument("--bca-rel-tol", type=float, default=1e-5)
    p.add_argument("--bca-max-iter", type=int, default=50)
    p.add_argument("--ridge", type=float, default=0.0)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUTDIR_ENV)
    if not out:
        raise CoreglassoError(
            f"no output directory: pass --out or set {OUTDIR_ENV}"
        )
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _checksums(paths: dict) -> dict:
    return {
        name: {"path": str(p), "sha256": sha256_file(p)}
        for name, p in paths.items()
        if p is not None
    }


def _meta(command, args, inputs, extra=None) -> dict:
    hyper_keys = (
        "lam", "e", "M", "eps_w", "glasso_tol", "glasso_max_iter",
        "lp_tol", "bca_rel_tol", "bca_max_iter", "ridge", "seed",
        "threshold", "k", "t", "jobs",
    )
    resolved = {
        k: getattr(args, k) for k in hyper_keys if hasattr(args, k)
    }
    meta = {
        "command": command,
        "version": __version__,
        "parameters": resolved,
        "inputs": _checksums(inputs),
    }
    if extra:
        meta.update(extra)
    return meta


def _load_distances(args, n):
    if args.distances is None:
        if args.e > 0:
            raise CoreglassoError(
                "distance coupling --e > 0 requires --distances"
            )
        return None
    values, _ = read_square_csv(args.distances, name="distance matrix")
    dist = DistanceMatrix(values)
    if dist.n_nodes != n:
        raise CoreglassoError(
            f"distance matrix is {dist.n_nodes}x{dist.n_nodes} for {n} nodes"
        )
    return dist


def cmd_fit(args) -> int:
    out = _out_dir(args)
    features = read_features_csv(args.features)
    dist = _load_distances(args, features.n_nodes)
    hyper = _hyper_from_args(args)
    result = bca_fit(features, dist=dist, hyper=hyper)

    labels = features.node_labels
    write_scores_json(out / "scores.json", result.c, labels=labels)
    write_edges_tsv(out / "edges.tsv", result.theta, threshold=args.threshold)
    write_matrix_csv(out / "theta.csv", result.theta.values)
    write_trace_csv(out / "trace.csv", result.objective_trace)
    budget = hyper.resolve_budget(features.n_nodes)
    edges = int(support(result.theta, args.threshold)[np.triu_indices(features.n_nodes, 1)].sum())
    meta = _meta("fit", args, {"features": args.features, "distances": args.distances}, {
        "resolved_M": budget,
        "n_nodes": features.n_nodes,
        "n_samples": features.n_samples,
        "converged": result.converged,
        "outer_iterations": result.outer_iterations,
        "objective": result.objective_trace[-1],
        "edges": edges,
    })
    write_json(out / "meta.json", meta)
    return 0 if result.converged else 2


def cmd_scores_from_graph(args) -> int:
    out = _out_dir(args)
    adjacency, labels = read_square_csv(args.graph, name="adjacency")
    n = adjacency.shape[0]
    dist = _load_distances(args, n)
    budget = n / 8.0 if args.M is None else args.M
    result = scores_from_graph(
        adjacency, dist=dist, e=args.e, M=budget,
        eps_w=args.eps_w, lp_tol=args.lp_tol,
    )
    write_scores_json(out / "scores.json", result.c, labels=labels)
    meta = _meta("scores-from-graph", args,
                 {"graph": args.graph, "distances": args.distances}, {
                     "resolved_M": budget,
                     "objective": result.objective,
                     "active_constraints": [list(p) for p in result.active_constraints],
                 })
    write_json(out / "meta.json", meta)
    return 0


def cmd_glasso(args) -> int:
    out = _out_dir(args)
    features = read_features_csv(args.features)
    n = features.n_nodes
    dist = _load_distances(args, n)
    if args.scores is not None:
        scores = read_scores_json(args.scores)
        if len(scores) != n:
            raise CoreglassoError(
                f"scores length {len(scores)} does not match {n} nodes"
            )
        c = scores.values
    else:
        c = np.zeros(n)
    weights = compute_weights(c, dist, args.e, args.eps_w)
    s = empirical_covariance(features, args.ridge)
    result = weighted_glasso(
        s, weights, args.lam,
        tol=args.glasso_tol, max_iter=args.glasso_max_iter,
    )
    write_matrix_csv(out / "theta.csv", result.theta.values)
    write_edges_tsv(out / "edges.tsv", result.theta, threshold=args.threshold)
    meta = _meta("glasso", args, {
        "features": args.features,
        "distances": args.distances,
        "scores": args.scores,
    }, {
        "converged": result.converged,
        "iterations": result.iterations,
        "objective": result.objective,
        "kkt_residual": result.kkt_residual,
    })
    write_json(out / "meta.json", meta)
    return 0 if result.converged else 2


def cmd_sample(args) -> int:
    out = _out_dir(args)
    n = args.n
    budget = n / 8.0 if args.M is None else args.M
    c_true = planted_scores(
        n, core_frac=args.core_frac, core_value=args.core_value, budget=budget
    )
    dist = None
    if args.with_coordinates or args.e > 0:
        coords, dist = sample_coordinates(n, seed=args.seed)
        write_matrix_csv(out / "coords.csv", coords)
        write_matrix_csv(out / "dist.csv", dist.values)
    inst = sample_instance(
        n, args.d, c_true, lam=args.lam, e=args.e, dist=dist,
        sparsify_at=args.sparsify_at, pd_margin=args.pd_margin,
        seed=args.seed,
    )
    write_matrix_csv(out / "features.csv", inst.X.values)
    write_matrix_csv(out / "theta_true.csv", inst.theta_true.values)
    write_scores_json(out / "c_true.json", c_true)
    meta = _meta("sample", args, {}, {
        "resolved_M": budget,
        "n_nodes": n,
        "n_samples": args.d,
        "true_edges": int(
            (inst.theta_true.values[np.triu_indices(n, 1)] != 0).sum()
        ),
    })
    write_json(out / "meta.json", meta)
    return 0


def cmd_eval(args) -> int:
    out = _out_dir(args)
    truth_raw, _ = read_square_csv(args.truth, name="truth matrix")
    truth = (np.abs(truth_raw) > args.threshold).astype(float)
    np.fill_diagonal(truth, 0.0)
    theta_est, _ = read_square_csv(args.estimate, name="estimate", symmetric=True)
    n = truth.shape[0]
    if theta_est.shape[0] != n:
        raise CoreglassoError(
            f"estimate is {theta_est.shape[0]}x{theta_est.shape[0]}, truth is {n}x{n}"
        )

    scores = {}
    for item in args.scores or []:
        if "=" not in item:
            raise CoreglassoError(
                f"--scores expects NAME=PATH, got {item!r}"
            )
        name, path = item.split("=", 1)
        scores[name] = read_scores_json(path).values
    methods = [m for m in args.baselines.split(",") if m] if args.baselines != "none" else []
    for method in methods:
        if method == "minres":
            scores["minres"] = minres_scores(truth).c
        elif method == "kcores":
            scores["kcores"] = kcore_scores(truth).c
        else:
            raise CoreglassoError(f"unknown baseline {method!r}")
    if not scores:
        raise CoreglassoError("no score vectors: pass --scores or --baselines")

    rows = compare_methods(
        truth, theta_est, scores, t=args.t,
        binarize_estimate=args.binarize_estimate, threshold=args.threshold,
    )
    est_support = (np.abs(theta_est) > args.threshold).astype(int)
    np.fill_diagonal(est_support, 0)
    precision, recall, f1 = support_recovery(truth, est_support)

    with open(out / "table.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method,dist_truth,dist_estimate\n")
        for row in rows:
            fh.write(
                f"{row['method']},{row['dist_truth']!r},{row['dist_estimate']!r}\n"
            )
    table = {
        "table": rows,
        "support_recovery": {
            "precision": precision, "recall": recall, "f1": f1,
        },
        "t": args.t if args.t is not None else max(1, n // 4),
    }
    write_json(out / "table.json", table)
    meta = _meta("eval", args, {
        "truth": args.truth,
        "estimate": args.estimate,
    }, table)
    write_json(out / "meta.json", meta)
    return 0


def cmd_group_compare(args) -> int:
    out = _out_dir(args)
    group_a = [read_scores_json(p) for p in args.group_a]
    group_b = [read_scores_json(p) for p in args.group_b]
    n = len(group_a[0])
    k = args.k
    if k > n:
        print(f"warning: k={k} larger than {n} nodes; clamping", file=sys.stderr)
        k = n
    diff, top = group_compare(group_a, group_b, k=k)
    with open(out / "diff.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("node,diff\n")
        for i, v in enumerate(diff):
            fh.write(f"{i},{v!r}\n")
    summary = {
        "k": k,
        "top_k": [int(i) for i in top],
        "top_k_diff": [float(diff[i]) for i in top],
    }
    write_json(out / "top.json", summary)
    inputs = {f"group_a_{i}": p for i, p in enumerate(args.group_a)}
    inputs.update({f"group_b_{i}": p for i, p in enumerate(args.group_b)})
    meta = _meta("group-compare", args, inputs, summary)
    write_json(out / "meta.json", meta)
    return 0


def _grid_cell(payload):
    features_path, dist_path, hyper_kwargs, threshold = payload
    features = read_features_csv(features_path)
    dist = None
    if dist_path is not None:
        values, _ = read_square_csv(dist_path, name="distance matrix")
        dist = DistanceMatrix(values)
    hyper = Hyperparams(**hyper_kwargs)
    result = bca_fit(features, dist=dist, hyper=hyper)
    n = features.n_nodes
    edges = int(support(result.theta, threshold)[np.triu_indices(n, 1)].sum())
    total = n * (n - 1) // 2
    return {
        "lambda": hyper.lam,
        "e": hyper.e,
        "edges": edges,
        "edge_pct": 100.0 * edges / total,
        "converged": result.converged,
        "outer_iterations": result.outer_iterations,
        "objective": result.objective_trace[-1],
    }


def cmd_grid(args) -> int:
    out = _out_dir(args)
    lambdas = [float(tok) for tok in args.lambdas.split(",") if tok]
    es = [float(tok) for tok in args.es.split(",") if tok] if args.es else [args.e]
    if not lambdas or not es:
        raise CoreglassoError("empty grid: no lambda or e values")
    cells = []
    for e in es:
        for lam in lambdas:
            kwargs = dict(
                lam=lam, e=e, M=args.M, eps_w=args.eps_w,
                glasso_tol=args.glasso_tol, lp_tol=args.lp_tol,
                bca_rel_tol=args.bca_rel_tol, bca_max_iter=args.bca_max_iter,
                glasso_max_iter=args.glasso_max_iter, ridge=args.ridge,
            )
            cells.append((args.features, args.distances, kwargs, args.threshold))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_grid_cell, cells))
    else:
        results = [_grid_cell(cell) for cell in cells]

    with open(out / "grid.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lambda,e,edges,edge_pct,converged,outer_iterations,objective\n")
        for row in results:
            fh.write(
                f"{row['lambda']!r},{row['e']!r},{row['edges']},"
                f"{row['edge_pct']!r},{int(row['converged'])},"
                f"{row['outer_iterations']},{row['objective']!r}\n"
            )
    meta = _meta("grid", args, {
        "features": args.features, "distances": args.distances,
    }, {"cells": results})
    write_json(out / "meta.json", meta)
    return 0 if all(r["converged"] for r in results) else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coreglasso",
        description=(
            "Learn sparse Gaussian graphical models with core-periphery "
            "structure from node attributes."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="joint graph and core-score estimation")
    p.add_argument("--features", required=True)
    p.add_argument("--distances")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.0,
                   help="support threshold for the edge list")
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scores-from-graph", help="core scores for a known graph")
    p.add_argument("--graph", required=True, help="adjacency CSV")
    p.add_argument("--distances")
    p.add_argument("--out")
    p.add_argument("--e", type=float, default=0.0)
    p.add_argument("--M", type=float, default=None)
    p.add_argument("--eps-w", dest="eps_w", type=float, default=1e-3)
    p.add_argument("--lp-tol", dest="lp_tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_scores_from_graph)

    p = sub.add_parser("glasso", help="single weighted graphical lasso solve")
    p.add_argument("--features", required=True)
    p.add_argument("--scores", help="core scores JSON fixing the weights (default zeros)")
    p.add_argument("--distances")
    p.add_argument("--out")
    p.add_argument("--threshold", type=float, default=0.0)
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_glasso)

    p = sub.add_parser("sample", help="sample a planted synthetic instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=100.0,
                   help="Laplace prior scale (default %(default)s)")
    p.add_argument("--e", type=float, default=0.0)
    p.add_argument("--M", type=float, default=None)
    p.add_argument("--core-frac", type=float, default=0.25)
    p.add_argument("--core-value", type=float, default=0.49)
    p.add_argument("--sparsify-at", type=float, default=None)
    p.add_argument("--pd-margin", type=float, default=0.1)
    p.add_argument("--with-coordinates", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="block-model and recovery metrics")
    p.add_argument("--truth", required=True, help="ground-truth matrix CSV")
    p.add_argument("--estimate", required=True, help="estimated precision CSV")
    p.add_argument("--scores", action="append",
                   help="NAME=PATH score file (repeatable)")
    p.add_argument("--baselines", default="minres,kcores",
                   help="comma list of graph baselines, or 'none'")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--t", type=int, default=None, help="core size (default N/4)")
    p.add_argument("--binarize-estimate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("group-compare", help="normalized mean score difference")
    p.add_argument("--group-a", nargs="+", required=True)
    p.add_argument("--group-b", nargs="+", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_group_compare)

    p = sub.add_parser("grid", help="fit over a lambda (and e) grid")
    p.add_argument("--features", required=True)
    p.add_argument("--distances")
    p.add_argument("--lambdas", required=True, help="comma list of lambda values")
    p.add_argument("--es", default=None, help="comma list of e values")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.0)
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_grid)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CoreglassoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
