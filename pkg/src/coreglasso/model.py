"""Domain types and the core quantities of the joint graph/core-score model.

The model couples a Gaussian graphical model over node attributes with
per-node core scores: a precision matrix carries the graph, and the core
scores (optionally together with spatial distances) set a per-edge l1
penalty weight ``w_ij = 1 - c_i - c_j + e*log(d_ij)``.  This module holds
the value types, the empirical covariance, the penalty-weight
construction, and the joint MAP objective that the block solver ascends.
"""

import numpy as np

from dataclasses import dataclass

from .errors import ConfigError, InputError, NotPositiveDefiniteError

__all__ = [
    "FeatureMatrix",
    "DistanceMatrix",
    "CoreScores",
    "WeightMatrix",
    "Precision",
    "Hyperparams",
    "empirical_covariance",
    "compute_weights",
    "joint_objective",
]

_SUM_TOL = 1e-8


def _frozen(values, dtype=float):
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


def _check_square_symmetric(values, name, tol=1e-10):
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise InputError(f"{name} must be a square matrix, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} contains non-finite entries")
    scale = max(1.0, np.abs(v).max())
    if np.abs(v - v.T).max() > tol * scale:
        raise InputError(f"{name} must be symmetric")
    return 0.5 * (v + v.T)


@dataclass(frozen=True)
class FeatureMatrix:
    """Node attributes: N rows (nodes) by d columns (i.i.d. samples)."""

    values: np.ndarray
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise InputError(f"feature matrix must be 2-D, got {v.ndim}-D")
        n, d = v.shape
        if n < 2:
            raise InputError(f"need at least 2 nodes, got {n}")
        if d < 1:
            raise InputError("empty data: need at least one sample column")
        if not np.all(np.isfinite(v)):
            raise InputError("feature matrix contains non-finite entries")
        if self.node_labels is not None:
            labels = tuple(str(s) for s in self.node_labels)
            if len(labels) != n:
                raise InputError(
                    f"{len(labels)} node labels for {n} nodes"
                )
            object.__setattr__(self, "node_labels", labels)
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise spatial distances; the diagonal is ignored by all consumers."""

    values: np.ndarray

    def __post_init__(self):
        v = _check_square_symmetric(self.values, "distance matrix")
        off = v[~np.eye(v.shape[0], dtype=bool)]
        if off.size and off.min() < 0:
            raise InputError("distance matrix has negative entries")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class CoreScores:
    """Per-node core scores in [0, 1] summing to the mass budget."""

    values: np.ndarray
    budget: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise InputError("core scores must be a vector")
        if not np.all(np.isfinite(v)):
            raise InputError("core scores contain non-finite entries")
        if v.min() < -_SUM_TOL or v.max() > 1.0 + _SUM_TOL:
            raise InputError(
                f"core scores outside [0, 1]: min {v.min()}, max {v.max()}"
            )
        # Snap solver-level roundoff back onto the box.
        v = np.clip(v, 0.0, 1.0)
        if abs(float(v.sum()) - float(self.budget)) > _SUM_TOL:
            raise InputError(
                f"core scores sum to {v.sum()}, budget is {self.budget}"
            )
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "budget", float(self.budget))

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric nonnegative per-edge penalty weights, zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = _check_square_symmetric(self.values, "weight matrix")
        off = v[~np.eye(v.shape[0], dtype=bool)]
        if off.size and off.min() <= 0:
            raise InputError("off-diagonal weights must be strictly positive")
        np.fill_diagonal(v, 0.0)
        object.__setattr__(self, "values", _frozen(v))


@dataclass(frozen=True)
class Precision:
    """Symmetric positive-definite precision matrix."""

    values: np.ndarray

    def __post_init__(self):
        v = _check_square_symmetric(self.values, "precision matrix")
        try:
            np.linalg.cholesky(v)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(
                "precision matrix is not positive definite"
            ) from None
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Hyperparams:
    """Solver hyperparameters.

    Attributes
    ----------
    lam : penalty scale (lambda > 0).
    e : distance coupling (>= 0); requires distances when positive.
    M : core-mass budget; None resolves to N/8 at fit time.
    eps_w : strict-positivity floor for penalty weights.
    glasso_tol : KKT max-norm tolerance of the graph subproblem.
    lp_tol : duality-gap tolerance of the core-score subproblem.
    bca_rel_tol : relative objective-increase threshold of the outer loop.
    bca_max_iter : outer iteration cap.
    glasso_max_iter : sweep cap of the graph subproblem.
    ridge : diagonal loading added to the empirical covariance.
    """

    lam: float
    e: float = 0.0
    M: float | None = None
    eps_w: float = 1e-3
    glasso_tol: float = 1e-5
    lp_tol: float = 1e-9
    bca_rel_tol: float = 1e-5
    bca_max_iter: int = 50
    glasso_max_iter: int = 1000
    ridge: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        if self.e < 0:
            raise ConfigError("distance coupling e must be nonnegative")
        if self.M is not None and not self.M > 0:
            raise ConfigError("core budget M must be positive")
        if not self.eps_w > 0:
            raise ConfigError("weight floor eps_w must be positive")
        for name in ("glasso_tol", "lp_tol", "bca_rel_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("bca_max_iter", "glasso_max_iter"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.ridge < 0:
            raise ConfigError("ridge must be nonnegative")

    def resolve_budget(self, n_nodes: int) -> float:
        """Concrete core-mass budget for an N-node problem (default N/8)."""
        m = n_nodes / 8.0 if self.M is None else float(self.M)
        if m > n_nodes:
            raise ConfigError(
                f"core budget M={m} infeasible for {n_nodes} nodes (M <= N)"
            )
        return m


def _scores_vector(c) -> np.ndarray:
    if isinstance(c, CoreScores):
        return c.values
    v = np.asarray(c, dtype=float)
    if v.ndim != 1:
        raise InputError("core scores must be a vector")
    return v


def empirical_covariance(X, ridge: float = 0.0) -> np.ndarray:
    """Maximum-likelihood covariance of the sample columns.

    Parameters
    ----------
    X : FeatureMatrix or array of shape (N, d)
        Nodes on rows, i.i.d. samples on columns.
    ridge : float
        Nonnegative diagonal loading; makes the result positive definite
        when d < N.

    Returns
    -------
    ndarray of shape (N, N), exactly symmetric, PSD up to roundoff.
    """
    if ridge < 0:
        raise InputError("ridge must be nonnegative")
    v = X.values if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=float)
    if v.ndim != 2:
        raise InputError("feature matrix must be 2-D")
    n, d = v.shape
    if d == 0:
        raise InputError("empty data: need at least one sample column")
    if not np.all(np.isfinite(v)):
        raise InputError("feature matrix contains non-finite entries")
    centered = v - v.mean(axis=1, keepdims=True)
    s = centered @ centered.T / d
    s = 0.5 * (s + s.T)
    if ridge > 0:
        s[np.diag_indices(n)] += ridge
    return s


def compute_weights(c, dist: DistanceMatrix | None = None, e: float = 0.0,
                    eps_w: float = 1e-3) -> WeightMatrix:
    """Per-edge penalty weights ``max(eps_w, 1 - c_i - c_j + e*log(d_ij))``.

    The diagonal is left unpenalized (set to zero).  When ``e > 0`` the
    distance matrix is required and all off-diagonal distances must be
    strictly positive so the log term is finite.
    """
    cv = _scores_vector(c)
    n = cv.shape[0]
    raw = 1.0 - cv[:, None] - cv[None, :]
    if e > 0:
        if dist is None:
            raise ConfigError("distance coupling e > 0 requires distances")
        dv = dist.values if isinstance(dist, DistanceMatrix) else np.asarray(dist, float)
        if dv.shape != (n, n):
            raise InputError(
                f"distance matrix shape {dv.shape} does not match {n} nodes"
            )
        off = ~np.eye(n, dtype=bool)
        if dv[off].min() <= 0:
            raise ConfigError(
                "distance coupling e > 0 requires strictly positive "
                "off-diagonal distances"
            )
        logd = np.zeros_like(dv)
        logd[off] = np.log(dv[off])
        raw = raw + e * logd
    w = np.maximum(eps_w, raw)
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(w)


def _logdet_pd(theta: np.ndarray) -> float:
    try:
        chol = np.linalg.cholesky(theta)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "log det undefined: matrix is not positive definite"
        ) from None
    return 2.0 * float(np.log(np.diag(chol)).sum())


def joint_objective(theta, c, S: np.ndarray, hyper: Hyperparams,
                    dist: DistanceMatrix | None = None) -> float:
    """Joint MAP objective ``log det T - tr(S T) - lam * sum_ij w_ij |T_ij|``.

    The penalty sums over all ordered pairs i != j, so each undirected
    edge is counted twice; weights come from :func:`compute_weights` at
    the given core scores.
    """
    tv = theta.values if isinstance(theta, Precision) else np.asarray(theta, float)
    logdet = _logdet_pd(tv)
    w = compute_weights(c, dist, hyper.e, hyper.eps_w).values
    penalty = hyper.lam * float((w * np.abs(tv)).sum())
    return logdet - float((S * tv).sum()) - penalty
