"""Generative sampler for planted core-periphery instances.

Draws a precision matrix whose off-diagonal entries follow the Laplace
prior implied by planted core scores (scale ``1/(lam * w_ij)``), makes
it positive definite by diagonal dominance, and samples Gaussian node
attributes from the implied covariance.  Used as the ground-truth oracle
in recovery tests.

Randomness comes from ``numpy.random.default_rng`` (PCG64) with an
explicit seed; the draw order (Laplace upper triangle, then the normal
block) is part of the determinism contract and must not change.
"""

import numpy as np

from dataclasses import dataclass
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigError, InputError
from .model import CoreScores, DistanceMatrix, FeatureMatrix, Precision, compute_weights

__all__ = ["SyntheticInstance", "sample_instance", "sample_coordinates", "planted_scores"]


@dataclass(frozen=True)
class SyntheticInstance:
    """Planted ground truth plus data sampled from it."""

    c_true: CoreScores
    theta_true: Precision
    X: FeatureMatrix
    dist: DistanceMatrix | None
    seed: int


def planted_scores(n: int, core_frac: float = 0.25, core_value: float = 0.49,
                   budget: float | None = None) -> CoreScores:
    """Two-level planted core scores: a core block at ``core_value``.

    The first ``floor(core_frac * n)`` nodes form the core; the rest
    share the leftover mass uniformly so the total equals ``budget``
    (default ``n/8``).
    """
    if not 0 <= core_frac <= 1:
        raise InputError("core_frac must lie in [0, 1]")
    m = n / 8.0 if budget is None else float(budget)
    n_core = int(np.floor(core_frac * n))
    c = np.zeros(n)
    c[:n_core] = core_value
    leftover = m - core_value * n_core
    if leftover < -1e-12 or (n_core == n and abs(leftover) > 1e-12):
        raise ConfigError(
            f"core block mass {core_value * n_core} exceeds budget {m}"
        )
    if n_core < n:
        c[n_core:] = leftover / (n - n_core)
    return CoreScores(c, budget=m)


def sample_instance(n: int, d: int, c_true: CoreScores, lam: float,
                    e: float = 0.0, dist: DistanceMatrix | None = None,
                    sparsify_at: float | None = None, pd_margin: float = 0.1,
                    seed: int = 0) -> SyntheticInstance:
    """Sample a planted instance of the generative model.

    Parameters
    ----------
    n, d : graph size and number of attribute samples.
    c_true : planted core scores.
    lam : Laplace prior scale parameter; entry (i, j) has expected
        magnitude ``1/(lam * w_ij)``.
    e, dist : distance coupling, as in the weight construction.
    sparsify_at : magnitude below which drawn entries are zeroed; None
        uses the 30th percentile of the drawn magnitudes so the planted
        support is unambiguous.
    pd_margin : diagonal-dominance margin added to the row sums; must be
        positive.
    seed : RNG seed; fixed seed gives a byte-identical instance.
    """
    if len(c_true) != n:
        raise InputError(f"c_true has {len(c_true)} entries for n={n}")
    if d < 1:
        raise InputError("need at least one sample column")
    if not lam > 0:
        raise InputError("lambda must be positive")
    if not pd_margin > 0:
        raise ConfigError("pd_margin must be positive")

    rng = np.random.default_rng(seed)
    w = compute_weights(c_true, dist, e).values
    iu = np.triu_indices(n, k=1)
    scale = 1.0 / (lam * w[iu])
    offd = rng.laplace(loc=0.0, scale=scale)
    threshold = (
        float(np.percentile(np.abs(offd), 30.0))
        if sparsify_at is None
        else float(sparsify_at)
    )
    offd[np.abs(offd) < threshold] = 0.0

    theta = np.zeros((n, n))
    theta[iu] = offd
    theta += theta.T
    theta[np.diag_indices(n)] = np.abs(theta).sum(axis=1) + pd_margin

    factor = cho_factor(theta, lower=True)
    sigma = cho_solve(factor, np.eye(n))
    sigma = 0.5 * (sigma + sigma.T)
    chol = np.linalg.cholesky(sigma)
    X = chol @ rng.standard_normal((n, d))

    return SyntheticInstance(
        c_true=c_true,
        theta_true=Precision(theta),
        X=FeatureMatrix(X),
        dist=dist,
        seed=seed,
    )


def sample_coordinates(n: int, seed: int = 0):
    """Uniform points in the unit square and their pairwise distances.

    Returns ``(coordinates, dist)`` where coordinates has shape (n, 2).
    Coincident points are re-drawn so all off-diagonal distances are
    strictly positive.
    """
    if n < 2:
        raise InputError("need at least 2 nodes")
    rng = np.random.default_rng(seed)
    off = ~np.eye(n, dtype=bool)
    for _ in range(100):
        pts = rng.uniform(0.0, 1.0, size=(n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        dmat = np.sqrt((diff ** 2).sum(axis=-1))
        if dmat[off].min() > 0.0:
            return pts, DistanceMatrix(dmat)
    raise ConfigError("could not sample distinct coordinates")
