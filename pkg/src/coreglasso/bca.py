"""Block coordinate ascent on the joint graph/core-score objective.

Alternates two exact convex solves: the weighted graphical lasso in the
precision matrix (weights fixed by the current core scores) and the
core-score linear program (edge magnitudes fixed by the current
precision matrix).  Each half-step maximizes the joint objective over
its own block, so the objective trace is nondecreasing up to solver
tolerance; the loop stops when the relative increase per outer
iteration falls below ``bca_rel_tol``.
"""

import numpy as np

from dataclasses import dataclass

from .corescore import core_score_lp, max_core_mass
from .errors import ConfigError, InputError
from .glasso import GlassoResult, weighted_glasso
from .model import (
    CoreScores,
    DistanceMatrix,
    FeatureMatrix,
    Hyperparams,
    Precision,
    compute_weights,
    empirical_covariance,
    joint_objective,
)

__all__ = ["FitResult", "fit", "fit_graph_given_scores"]


@dataclass(frozen=True)
class FitResult:
    """Joint solution with the half-step objective trace.

    ``objective_trace`` holds the joint objective after every half-step
    (two entries per outer iteration), so monotone ascent is checkable
    at half-step granularity.
    """

    theta: Precision
    c: CoreScores
    objective_trace: tuple[float, ...]
    outer_iterations: int
    converged: bool


def _as_features(X) -> FeatureMatrix:
    return X if isinstance(X, FeatureMatrix) else FeatureMatrix(np.asarray(X, float))


def fit(X, dist: DistanceMatrix | None = None,
        hyper: Hyperparams | None = None, *,
        c_init: CoreScores | None = None,
        theta_init=None) -> FitResult:
    """Jointly learn a sparse precision matrix and core scores.

    Parameters
    ----------
    X : FeatureMatrix or (N, d) array of node attributes.
    dist : distances, required when ``hyper.e > 0``.
    hyper : solver hyperparameters (budget None resolves to N/8).
    c_init : optional initial core scores (default: uniform M/N).
    theta_init : optional PD warm start for the first graph step.

    Returns
    -------
    FitResult; ``converged`` is unset if the outer cap was reached.
    """
    if hyper is None:
        raise ConfigError("hyperparameters are required")
    fm = _as_features(X)
    n = fm.n_nodes
    if hyper.e > 0 and dist is None:
        raise ConfigError("distance coupling e > 0 requires distances")
    if dist is not None and dist.n_nodes != n:
        raise InputError(
            f"distance matrix is {dist.n_nodes}x{dist.n_nodes} for {n} nodes"
        )
    budget = hyper.resolve_budget(n)
    cap = max_core_mass(n, dist, hyper.e, hyper.eps_w)
    if budget > cap + 1e-9:
        raise ConfigError(
            f"core budget M={budget:.6g} exceeds the maximum feasible core "
            f"mass {cap:.6g} under the pairwise bounds"
        )

    s = empirical_covariance(fm, hyper.ridge)
    if np.diag(s).min() <= 0:
        raise InputError(
            "a node has zero sample variance; add ridge or drop the node"
        )
    if c_init is None:
        c = CoreScores(np.full(n, budget / n), budget=budget)
    else:
        if len(c_init) != n:
            raise InputError("c_init length mismatch")
        c = c_init
    theta = None if theta_init is None else (
        theta_init.values if isinstance(theta_init, Precision) else np.asarray(theta_init, float)
    )

    ref = np.diag(1.0 / np.diag(s)) if theta is None else theta
    obj_prev = joint_objective(ref, c, s, hyper, dist)

    trace: list[float] = []
    converged = False
    outer = 0
    for outer in range(1, hyper.bca_max_iter + 1):
        w = compute_weights(c, dist, hyper.e, hyper.eps_w)
        gres = weighted_glasso(
            s, w, hyper.lam,
            tol=hyper.glasso_tol,
            max_iter=hyper.glasso_max_iter,
            warm_start=theta,
        )
        theta = gres.theta.values
        trace.append(joint_objective(theta, c, s, hyper, dist))

        # Diagonal gains are excluded here: the joint objective never
        # penalizes the diagonal, so including them would let the score
        # step decrease it.
        lp = core_score_lp(
            np.abs(theta), dist, hyper.e, budget,
            eps_w=hyper.eps_w, lp_tol=hyper.lp_tol,
            include_diagonal=False,
        )
        c = lp.c
        obj = joint_objective(theta, c, s, hyper, dist)
        trace.append(obj)

        if (obj - obj_prev) / max(1.0, abs(obj_prev)) < hyper.bca_rel_tol:
            converged = True
            break
        obj_prev = obj

    return FitResult(
        theta=Precision(theta),
        c=c,
        objective_trace=tuple(trace),
        outer_iterations=outer,
        converged=converged,
    )


def fit_graph_given_scores(X, c: CoreScores,
                           dist: DistanceMatrix | None = None,
                           hyper: Hyperparams | None = None) -> GlassoResult:
    """Single graph step for fixed core scores.

    Convenience entry point: one weighted graphical lasso solve with the
    weights implied by ``c``.  The scores must respect the pairwise
    bounds so the weight floor stays inactive.
    """
    if hyper is None:
        raise ConfigError("hyperparameters are required")
    fm = _as_features(X)
    n = fm.n_nodes
    if len(c) != n:
        raise InputError("core scores length mismatch")
    if hyper.e > 0 and dist is None:
        raise ConfigError("distance coupling e > 0 requires distances")
    cv = c.values
    pair = cv[:, None] + cv[None, :]
    limit = np.full((n, n), 1.0 - hyper.eps_w)
    if hyper.e > 0:
        dv = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, float)
        off = ~np.eye(n, dtype=bool)
        limit[off] += hyper.e * np.log(dv[off])
    np.fill_diagonal(limit, np.inf)
    if np.any(pair > limit + 1e-9):
        i, j = np.unravel_index(np.argmax(pair - limit), pair.shape)
        raise ConfigError(
            f"core scores violate the pairwise bound on ({i}, {j}): "
            f"c_i + c_j = {pair[i, j]:.6g} > {limit[i, j]:.6g}"
        )
    s = empirical_covariance(fm, hyper.ridge)
    w = compute_weights(c, dist, hyper.e, hyper.eps_w)
    return weighted_glasso(
        s, w, hyper.lam, tol=hyper.glasso_tol, max_iter=hyper.glasso_max_iter
    )
