"""Shared fixtures and independent oracles for the test suite."""
import math

import numpy as np

from krigreg.cases import CASES

APPENDIX_IDS = ("repeated", "additive1", "additive2", "periodic", "linear")


def appendix_cases():
    return [CASES[i] for i in APPENDIX_IDS]


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    A = rng.normal(size=(n, rank))
    return A @ A.T


def repeated_fixture(seed):
    """1-D design with 4-7 well separated sites, at least one of them repeated.

    Returns X, y and the per-site counts (sites in increasing order).
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(4, 8))
    sites = np.sort(rng.uniform(0, 4, k))
    while np.min(np.diff(sites)) < 0.3:
        sites = np.sort(rng.uniform(0, 4, k))
    counts = rng.integers(1, 5, k)
    counts[rng.integers(k)] = max(2, counts.max())
    X = np.repeat(sites, counts)
    y = np.repeat(2 * np.sin(2 * sites), counts) + rng.normal(0, 0.5, X.size)
    return X, y, counts


def inflate_spread(X, y, factor, site):
    """Scale the deviations from the site mean at one repeated site; the mean is kept."""
    xs = np.unique(X)
    m = X == xs[site]
    out = y.copy()
    out[m] = y[m].mean() + factor * (y[m] - y[m].mean())
    return out


def dense_neg2ll(C, y, tau2):
    """``-2 log L`` minus ``n log 2 pi`` by Cholesky, no eigendecomposition."""
    K = C + tau2 * np.eye(len(y))
    L = np.linalg.cholesky(K)
    z = np.linalg.solve(L, y)
    return 2 * np.sum(np.log(np.diag(L))) + z @ z


def grid_argmin(objective_batch, lo, hi, n=100_000):
    """Argmin of a vectorized objective on a log grid: full-range scan, then a dense scan of the bracket."""
    u = np.linspace(math.log(lo), math.log(hi), 2001)
    v = objective_batch(np.exp(u))
    i = int(np.argmin(v))
    a, b = u[max(i - 1, 0)], u[min(i + 1, u.size - 1)]
    uu = np.linspace(a, b, n)
    return float(np.exp(uu[np.argmin(objective_batch(np.exp(uu)))]))


def spectral_batch(sd, y):
    """Vectorized nugget objective over an array of nuggets, for grid oracles."""
    coef2 = (sd.eigenvectors.T @ y) ** 2

    def f(t):
        shifted = sd.eigenvalues[None, :] + np.asarray(t)[:, None]
        return np.log(shifted).sum(axis=1) + (coef2 / shifted).sum(axis=1)

    return f
