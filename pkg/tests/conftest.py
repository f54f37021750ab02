"""Shared test helpers: random PD matrices and an independent LP oracle."""

import itertools

import numpy as np
import pytest


def rand_pd(n, rng, n_samples=None, shift=0.5):
    """Well-conditioned random PD matrix A A^T / k + shift I."""
    k = n_samples or 3 * n
    a = rng.standard_normal((n, k))
    return a @ a.T / k + shift * np.eye(n)


def pair_bounds(n, dmat, e, eps_w):
    """Upper bounds on c_i + c_j, from first principles."""
    b = np.full((n, n), 1.0 - eps_w)
    if e > 0:
        off = ~np.eye(n, dtype=bool)
        b[off] += e * np.log(dmat[off])
    np.fill_diagonal(b, np.inf)
    return b


def lp_vertex_oracle(gains, bounds, mass, tol=1e-9):
    """Brute-force LP optimum by enumerating basic feasible solutions.

    Builds every vertex candidate from subsets of the active-constraint
    pool (budget equality plus n-1 rows drawn from the box and pairwise
    bounds), keeps the feasible ones, and returns (best value, argmax),
    or (-inf, None) when the polytope is empty.
    """
    n = gains.shape[0]
    cands = []
    for i in range(n):
        row = np.zeros(n)
        row[i] = 1.0
        cands.append((row, 0.0))
        cands.append((row.copy(), 1.0))
    for i in range(n):
        for j in range(i + 1, n):
            row = np.zeros(n)
            row[i] = 1.0
            row[j] = 1.0
            cands.append((row, bounds[i, j]))

    combos = list(itertools.combinations(range(len(cands)), n - 1))
    mats = np.empty((len(combos), n, n))
    rhs = np.empty((len(combos), n))
    for k, combo in enumerate(combos):
        mats[k, 0] = np.ones(n)
        rhs[k, 0] = mass
        for r, idx in enumerate(combo):
            mats[k, r + 1] = cands[idx][0]
            rhs[k, r + 1] = cands[idx][1]
    keep = np.abs(np.linalg.det(mats)) > 1e-9
    if not keep.any():
        return -np.inf, None
    solutions = np.linalg.solve(mats[keep], rhs[keep][..., None])[..., 0]

    best, best_x = -np.inf, None
    for x in solutions:
        if x.min() < -tol or x.max() > 1.0 + tol:
            continue
        if abs(x.sum() - mass) > tol:
            continue
        sums = x[:, None] + x[None, :]
        if np.any(sums > bounds + tol):
            continue
        value = float(gains @ x)
        if value > best:
            best, best_x = value, x
    return best, best_x


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
